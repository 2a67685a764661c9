"""Single source for the version string stamped into results and files."""

VERSION = "0.1.0"
