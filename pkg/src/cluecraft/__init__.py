"""Codenames clue-giving engine.

Selects a single-word clue and the pair of team words it is meant to
indicate, using either word-embedding cosine relatedness or knowledge-graph
path relatedness, with an optional document-frequency + dictionary-embedding
re-weighting term (DETECT). Also ships the trial/response machinery for
running human evaluation sessions over HTTP.
"""

__version__ = "0.1.0"
