"""Rate regions for a macro/femto uplink relayed over a capacity-limited backhaul."""

__version__ = "0.1.0"
