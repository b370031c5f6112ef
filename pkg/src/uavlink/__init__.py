"""Link-level 5G NR uplink simulator for aerial image offloading."""

__version__ = "0.1.0"
