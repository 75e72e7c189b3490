"""Prime-factorization caching: relationships as composites, discovery by factoring."""

__version__ = "0.1.0"
