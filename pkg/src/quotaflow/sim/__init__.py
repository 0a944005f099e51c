from .client import HttpClient, LocalClient
from .fixtures import seed, seed_demo, seed_minimal, seed_randomized
from .fuzz import fuzz
from .scripts import parse_script, play

__all__ = [
    "HttpClient",
    "LocalClient",
    "fuzz",
    "parse_script",
    "play",
    "seed",
    "seed_demo",
    "seed_minimal",
    "seed_randomized",
]
