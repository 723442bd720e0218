"""Pattern statistics in random multiset permutations and set partitions."""

__version__ = "0.1.0"
