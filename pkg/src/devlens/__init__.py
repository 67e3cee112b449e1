"""devlens: desk-scale engineering telemetry platform.

Ingests development telemetry from pluggable sources, pre-computes
delivery and quality metrics into a time-series store, evaluates alert
thresholds, and serves results through token-authenticated HTTP APIs.
"""

__version__ = "0.1.0"
