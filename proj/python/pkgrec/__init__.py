"""Package recommendation: complementary packages from import co-occurrence
embeddings, alternative packages from TF-IDF retrieval over library
descriptions."""

from ._pkgrec import *  # noqa: F401,F403
from ._pkgrec import __version__  # noqa: F401
