"""Regenerate fixture200.jsonl, the bundled 200-sample synthetic dataset.

Run from the repo root:  python3 tests/data/gen_fixture200.py

The topic layout is chosen so a popularity-ordered train fill at ratios
(0.8, 0.1, 0.1) lands inside the 2-percentage-point tolerance: 198 samples
carry a topic (sizes 60, 30, 20, 15, 12, 10, 8, 4, then a tail of 4x3,
9x2, 9x1) and two samples have no instances at all.

Each sample's description phrase is planted either in the first sentence,
after roughly token 32, or after roughly token 64, so overlap against
growing paragraph prefixes genuinely increases with the prefix length.
Deterministic: fixed seed, no timestamps.
"""

import json
import os
import random

TOPIC_SIZES = [
    ("human", 60),
    ("taxon", 30),
    ("film", 20),
    ("village", 15),
    ("album", 12),
    ("river", 10),
    ("mountain", 8),
    ("school", 4),
    ("painting", 3),
    ("lake", 3),
    ("road", 3),
    ("song", 3),
    ("church", 2),
    ("bridge", 2),
    ("castle", 2),
    ("museum", 2),
    ("island", 2),
    ("park", 2),
    ("shipwreck", 2),
    ("canal", 2),
    ("opera", 2),
    ("windmill", 1),
    ("lighthouse", 1),
    ("observatory", 1),
    ("glacier", 1),
    ("waterfall", 1),
    ("fortress", 1),
    ("monastery", 1),
    ("aqueduct", 1),
    ("brewery", 1),
]

PLACES = [
    "Norway", "Kenya", "Chile", "Vietnam", "Poland", "Canada", "Laos",
    "Peru", "Estonia", "Ghana", "Portugal", "Nepal", "Iceland", "Uruguay",
]
REGIONS = [
    "northern", "southern", "eastern", "western", "central", "coastal",
    "highland", "lowland",
]
NATIONALITIES = [
    "Norwegian", "Kenyan", "Chilean", "Vietnamese", "Polish", "Canadian",
    "Peruvian", "Estonian", "Ghanaian", "Portuguese",
]
PROFESSIONS = [
    "painter", "footballer", "composer", "botanist", "historian",
    "architect", "journalist", "sculptor", "chemist", "poet",
]
GENERA = ["Carex", "Acacia", "Euphorbia", "Salvia", "Piper", "Solanum"]
DIRECTORS = ["Mira Chen", "Tomas Berg", "Ana Sosa", "Kofi Mensah", "Lena Vogel"]
BANDS = ["the Harbour Lights", "Stone Meadow", "the Blue Larks", "Ferntree", "Cold Anchor"]
SURNAMES = [
    "Bergstrom", "Okafor", "Maldonado", "Tran", "Kowalski", "Fontaine",
    "Njenga", "Silva", "Tamm", "Eriksen", "Duarte", "Rai",
]
GIVEN = [
    "Anders", "Grace", "Mateo", "Linh", "Agata", "Noel", "Wanjiru",
    "Rui", "Kati", "Sigrid", "Bruno", "Maya",
]

# Filler sentences share no content words with any description phrase.
FILLERS = [
    "Local records from that period are sparse and often contradictory.",
    "A small committee now oversees maintenance and seasonal access.",
    "Nearby settlements grew quickly once the railway reached this corner.",
    "Several details from those early decades remain actively debated.",
    "The surrounding landscape is known for long winters and short bright summers.",
    "Visitor numbers rose steadily through the following decades.",
    "Materials from that era survive today inside a regional archive.",
    "Photographs taken before 1900 show a very different layout.",
    "Restoration work carried out after 1955 preserved most original features.",
    "Older maps mark the spot under an entirely different name.",
]


def assemble(rng, first, key_sentence, variant):
    """Place key_sentence in the first sentence zone, past ~token 32, or
    past ~token 64, padding with fillers."""
    fillers = rng.sample(FILLERS, 6)
    if variant == "early":
        sentences = [first, key_sentence] + fillers[:3]
    elif variant == "mid":
        # two fillers (~20 tokens) push the key sentence past token 32
        sentences = [first, fillers[0], fillers[1], key_sentence] + fillers[2:4]
    else:
        # five fillers (~50 tokens) push it past token 64
        sentences = [first] + fillers[:5] + [key_sentence]
    return " ".join(sentences)


def pick_variant(rng):
    roll = rng.random()
    if roll < 0.45:
        return "early"
    if roll < 0.8:
        return "mid"
    return "late"


def human_sample(rng, qid):
    name = f"{rng.choice(GIVEN)} {rng.choice(SURNAMES)}"
    nat = rng.choice(NATIONALITIES)
    prof = rng.choice(PROFESSIONS)
    born = rng.randint(1820, 1995)
    first = (
        f"{name} (born {born}) is known for a long and productive public"
        f" career spanning several decades."
    )
    key = f"Trained as a {nat} {prof}, {name.split()[0]} gained wide recognition."
    para = assemble(rng, first, key, pick_variant(rng))
    return {
        "qid": qid,
        "label": name,
        "description": f"{nat} {prof}",
        "instances": ["human"],
        "title": name,
        "paragraph": para,
        "first_sentence": first,
    }


def taxon_sample(rng, qid):
    genus = rng.choice(GENERA)
    epithet = rng.choice(
        ["montana", "rigida", "pallida", "obtusa", "gracilis", "vernalis", "humilis"]
    )
    name = f"{genus} {epithet}"
    first = (
        f"{name} was first described in {rng.randint(1750, 1950)} from"
        f" specimens gathered on open rocky ground."
    )
    key = f"It is a species of flowering plant in the genus {genus}."
    para = assemble(rng, first, key, pick_variant(rng))
    return {
        "qid": qid,
        "label": name,
        "description": f"species of plant in the genus {genus}",
        "instances": ["taxon"],
        "title": name,
        "paragraph": para,
        "first_sentence": first,
    }


def film_sample(rng, qid):
    title = f"The {rng.choice(['Quiet', 'Long', 'Last', 'Hidden', 'Silent'])} " + rng.choice(
        ["Harvest", "Crossing", "Signal", "Orchard", "Winter", "Tide"]
    )
    year = rng.randint(1950, 2020)
    director = rng.choice(DIRECTORS)
    first = (
        f"{title} follows a small community through a single difficult"
        f" season of work and weather."
    )
    key = f"The {year} film was directed by {director}."
    para = assemble(rng, first, key, pick_variant(rng))
    return {
        "qid": qid,
        "label": title,
        "description": f"{year} film directed by {director}",
        "instances": ["film"],
        "title": title,
        "paragraph": para,
        "first_sentence": first,
    }


def album_sample(rng, qid):
    title = rng.choice(
        ["Low Tide", "Night Orchard", "Paper Lanterns", "True North", "Emberline",
         "Quiet Engines", "Salt and Smoke", "Second Summer"]
    )
    band = rng.choice(BANDS)
    year = rng.randint(1970, 2021)
    first = (
        f"{title} was recorded over several quiet months and released"
        f" in {year} to warm reviews."
    )
    key = f"It is a studio album by {band}."
    para = assemble(rng, first, key, pick_variant(rng))
    return {
        "qid": qid,
        "label": title,
        "description": f"studio album by {band}",
        "instances": ["album"],
        "title": title,
        "paragraph": para,
        "first_sentence": first,
    }


GEO_STEMS = {
    "village": ("Vik", "Sol", "Var", "Karu", "Mala", "Tien"),
    "river": ("Kal", "Ser", "Lom", "Bra", "Tor", "Osa"),
    "mountain": ("Hal", "Stor", "Ker", "Van", "Mor", "Alt"),
    "lake": ("Lys", "Ser", "Val", "Nar", "Kol", "Ein"),
    "road": ("North", "Mill", "Harbour", "Ridge", "South", "Church"),
    "school": ("Hillside", "Riverside", "Lakeview", "Greenfield", "Westgate", "Northgate"),
    "church": ("St Olaf", "St Clara", "Holy Cross", "St Anselm", "All Souls", "St Bride"),
    "bridge": ("Calder", "Miren", "Stone", "Ferry", "Old Mill", "Queens"),
    "castle": ("Varga", "Holm", "Rane", "Ester", "Korb", "Lind"),
    "museum": ("Maritime", "Textile", "Railway", "Mining", "Folk", "Glass"),
    "island": ("Skar", "Lund", "Teller", "Vass", "Gry", "Hest"),
    "park": ("Elm", "Cedar", "Birch", "Alder", "Rowan", "Aspen"),
    "shipwreck": ("Mira", "Corona", "Albatross", "Vesta", "Delfin", "Aurora"),
    "canal": ("Eider", "Lower", "Upper", "Grand", "Summit", "Junction"),
    "opera": ("The Winter King", "Marisol", "The Glass Garden", "Night Ferry", "Elvira", "The Lark"),
    "painting": ("Morning Field", "The Skaters", "Harbour Dusk", "Blue Interior", "The Reapers", "Still Point"),
    "song": ("Paper Moon", "Cold Water", "Northern Line", "Lantern", "Slow Train", "Harvest Home"),
    "windmill": ("Kinder", "Oster", "Weide", "Molen", "Drenthe", "Polder"),
    "lighthouse": ("Old Harbour", "Point Arden", "Cape Fen", "Skerry", "Outer Bank", "Stone Reef"),
    "observatory": ("Hillcrest", "Meridian", "Clearwater", "Summit", "Aurora", "Zenith"),
    "glacier": ("Storbre", "Vesle", "Blue Ice", "Hanging", "Upper Fork", "Twin"),
    "waterfall": ("Silver Veil", "Thunder Step", "Bridal Fall", "Mist Leap", "Roaring Gap", "High Force"),
    "fortress": ("Akershagen", "Stenfort", "Ravelin", "Castellan", "Bastion Hill", "Watch Rock"),
    "monastery": ("St Gallus", "Vetka", "Sand Abbey", "Clearbrook", "Monte Sereno", "Ash Priory"),
    "aqueduct": ("Valle Verde", "Pont Neuf", "Arches", "Segovia Minor", "Longspan", "Dryrun"),
    "brewery": ("Anchor Field", "Copper Kettle", "Three Crowns", "Old Malt", "Granary", "North Quay"),
}

GEO_SUFFIX = {
    "village": "by", "river": "a River", "mountain": "fjell", "lake": " Lake",
    "road": " Road", "school": " School", "church": " Church", "bridge": " Bridge",
    "castle": " Castle", "museum": " Museum", "island": "oy", "park": " Park",
    "shipwreck": "", "canal": " Canal", "opera": "", "painting": "", "song": "",
    "windmill": " Mill", "lighthouse": " Light", "observatory": " Observatory",
    "glacier": " Glacier", "waterfall": " Falls", "fortress": " Fortress",
    "monastery": " Monastery", "aqueduct": " Aqueduct", "brewery": " Brewery",
}


def geo_sample(rng, qid, topic):
    stem = rng.choice(GEO_STEMS[topic])
    label = f"{stem}{GEO_SUFFIX[topic]}"
    place = rng.choice(PLACES)
    region = rng.choice(REGIONS)
    year = rng.randint(1100, 1990)
    first = (
        f"{label} has served the surrounding district since records first"
        f" mention the site in {year}."
    )
    key = f"It is a {topic} in the {region} part of {place}."
    para = assemble(rng, first, key, pick_variant(rng))
    return {
        "qid": qid,
        "label": label,
        "description": f"{topic} in {place}",
        "instances": [topic],
        "title": label,
        "paragraph": para,
        "first_sentence": first,
    }


def empty_instance_sample(rng, qid, idx):
    label = f"Harbour Ruin {idx}"
    place = rng.choice(PLACES)
    first = (
        f"{label} stands near the old waterfront where only fragments of"
        f" stone remain above ground."
    )
    key = f"The ruin is a historic site in {place}."
    para = assemble(rng, first, key, pick_variant(rng))
    return {
        "qid": qid,
        "label": label,
        "description": f"historic site in {place}",
        "instances": [],
        "title": label,
        "paragraph": para,
        "first_sentence": first,
    }


def main():
    rng = random.Random(7)
    samples = []
    next_id = 100001
    for topic, size in TOPIC_SIZES:
        for _ in range(size):
            qid = f"Q{next_id}"
            next_id += 1
            if topic == "human":
                samples.append(human_sample(rng, qid))
            elif topic == "taxon":
                samples.append(taxon_sample(rng, qid))
            elif topic == "film":
                samples.append(film_sample(rng, qid))
            elif topic == "album":
                samples.append(album_sample(rng, qid))
            else:
                samples.append(geo_sample(rng, qid, topic))
    for idx in (1, 2):
        samples.append(empty_instance_sample(rng, f"Q{next_id}", idx))
        next_id += 1
    assert len(samples) == 200
    rng.shuffle(samples)
    out = os.path.join(os.path.dirname(__file__), "fixture200.jsonl")
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        for sample in samples:
            fh.write(json.dumps(sample, ensure_ascii=False) + "\n")
    print(f"wrote {len(samples)} samples -> {out}")


if __name__ == "__main__":
    main()
