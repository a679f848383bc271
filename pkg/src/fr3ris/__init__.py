"""Link-level simulator for RIS-assisted FR3 IoT downlinks."""

__version__ = "0.1.0"
