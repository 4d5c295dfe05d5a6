"""Sentiment classification of election tweets.

Cleaning, n-gram TF-IDF features, four classifiers trained from scratch
and a precision/recall/F1 experiment grid.
"""

__version__ = "0.1.0"
