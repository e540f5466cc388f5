"""Multi-agent hierarchical RL with LTL task specifications and logic reward shaping."""

__version__ = "0.1.0"
