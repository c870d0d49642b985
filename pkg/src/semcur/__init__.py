"""semcur: a deterministic conversation-to-curation engine.

Live or replayed conversation becomes a stream of curatable post-its;
artifact placements detected from depth maps (or issued as abstract
commands) pin, arrange, link, isolate, and contextualise them; every
session is an append-only, byte-identically replayable log.
"""

__version__ = "0.1.0"
