"""kinaffect: embodied-emotion inference from full-body movement streams."""

__version__ = "0.1.0"
