"""One-time generator for the bundled demo transcript.

Lays out a three-round climate discussion with plausible speech timing.
Recap utterances deliberately list several pillar phrases together so the
topic graph grows one dense component, and pillar phrases recur in
stopword-bounded positions so the stream contains honest duplicates.
Regenerate with:
  python tools/make_sample_transcript.py > src/semcur/data/sample_transcript.ndjson
"""
import json

ROUND_1 = [
    "how do we really solve climate change",
    "the biggest source is burning fossil fuels for electricity and heat",
    "transport emissions are rising again",
    "we could pair a carbon tax with public transport and insulation",
    "a carbon tax could change behaviour if the price is high",
    "people worry a carbon tax will hurt poor households",
    "return the revenue as a dividend to every household",
    "but public transport could use more capacity first",
    "cities can electrify the bus fleets now",
    "what about aviation and shipping",
    "synthetic fuels might cover aviation one day",
    "shipping could move to ammonia or methanol",
    "we must get green hydrogen into heavy industry and steel",
    "cement is a huge emitter too",
    "carbon capture only makes sense for cement kilns",
    "agriculture and land use are as big as energy",
    "eating meat is the biggest methane source",
    "a vegan party could make that a political platform",
    "rewilding farmland stores carbon in the soil",
    "so the pillars are carbon tax and public transport and green hydrogen and food",
]
ROUND_2 = [
    "let us turn these pillars into concrete ideas",
    "solar panels on every new roof should be mandatory",
    "more wind farms at sea would help",
    "grid storage is the bottleneck for renewables",
    "batteries are cheap but pumped hydro is durable",
    "heat pumps could replace gas boilers in most homes",
    "we should do insulation before new supply",
    "district heating can reuse waste heat from data centres",
    "public transport should be free in the city centre",
    "congestion pricing could pay for public transport",
    "bike lanes are cheap compared to roads",
    "night trains could replace most short flights",
    "we could get green hydrogen to the ports for shipping",
    "a carbon border tariff would keep industry here",
    "school meals could be plant based by default",
    "maybe the vegan party was a real idea",
    "soil carbon credits could pay farmers for rewilding",
    "community energy cooperatives can build local support",
    "so heat pumps and grid storage and wind farms and solar panels can join the plan for public transport",
]
ROUND_3 = [
    "now let us make a real plan with owners and dates",
    "maybe Anna should draft the carbon tax for us",
    "the draft should be ready by 15 March",
    "then Ben can model the dividend payout per household",
    "we review that model on Friday at 10:30",
    "then Clara could map the pilot for the bus fleets",
    "we pick the pilot city on 2 April",
    "then Dev can ask the port about green hydrogen",
    "that port meeting is set for 2025-04-10",
    "maybe Anna and Clara can talk to the council about public transport",
    "the council session is on 28 April",
    "then Ben should check storage vendors for the grid",
    "the vendor shortlist is due by 5 May",
    "then Clara can run the community energy workshop",
    "the workshop is on Saturday afternoon",
    "then Dev can write the proposal for school meals",
    "the plant based menus can start in September",
    "we can meet every Monday at 9:00 to track progress",
    "the final report is due by 30 June",
    "that gives us a plan for carbon tax and public transport and green hydrogen and food",
]


def lay_out(texts, start_ms, end_ms):
    """Spread utterances across a round with speech-like spans."""
    n = len(texts)
    slot = (end_ms - start_ms) // n
    rows = []
    for i, text in enumerate(texts):
        words = len(text.split())
        dur = min(2200 + 620 * words, 14000, slot - 1500)
        s = start_ms + i * slot + 900
        rows.append({"started_at_ms": s, "ended_at_ms": s + dur, "text": text})
    return rows


rows = (lay_out(ROUND_1, 0, 480_000)
        + lay_out(ROUND_2, 480_000, 960_000)
        + lay_out(ROUND_3, 960_000, 1_440_000))
print("# demo session transcript: three 8-minute rounds")
for row in rows:
    print(json.dumps(row))
