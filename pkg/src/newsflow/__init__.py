"""newsflow: distill news articles into sentiment variables and stock-reaction analytics."""

__version__ = "0.1.0"
