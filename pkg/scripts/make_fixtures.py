#!/usr/bin/env python3
"""Regenerate the bundled desk-scale fixtures.

Produces a small synthetic encyclopedia (page store + retrieval corpus),
claim files in both source formats, a mini WordNet-3.0-format lexicon,
and the demo experiment config. Everything is hand-authored constants;
running this script twice yields byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
FIX = ROOT / "fixtures"

# --- encyclopedia -----------------------------------------------------------
# page -> list of sentences; the first sentence is the usual evidence target.
PAGES: dict[str, list[str]] = {
    "Arden Bridge": [
        "Arden Bridge is a limestone road bridge that opened in 1921.",
        "The bridge spans the Tessio River near Port Ellery.",
        "Arden Bridge measures 310 meters between its abutments.",
    ],
    "Tessio River": [
        "The Tessio River flows 120 kilometers through the Veld Hills.",
        "The river empties into the Gulf of Sorrel.",
    ],
    "Lake Moreno": [
        "Lake Moreno covers forty square kilometers of open water.",
        "The lake hosts the Bluewing Regatta every summer.",
        "Its deepest basin reaches 80 meters.",
    ],
    "Calder Observatory": [
        "Calder Observatory is an astronomical observatory built in 1907 on Granite Peak.",
        "Its primary telescope carries a mirror 2 meters across.",
        "The observatory catalogues variable stars.",
    ],
    "Granite Peak Railway": [
        "The Granite Peak Railway is a mountain railway that opened in 1901.",
        "The line climbs 900 meters through seven tunnels.",
        "Steam locomotives still haul passenger carriages in summer.",
    ],
    "Halvern FC": [
        "Halvern FC is a football club founded in 1899.",
        "The club plays home matches at Port Ellery Stadium.",
        "Halvern FC won four national cups.",
    ],
    "Port Ellery": [
        "Port Ellery is a harbor city on the Gulf of Sorrel.",
        "The city exports timber and salt.",
        "A 2012 census counted 101749 residents.",
    ],
    "Mira Solen": [
        "Mira Solen is a singer whose debut album Glass Harbor appeared in 1994.",
        "Solen toured with the Kestrel Theatre orchestra.",
    ],
    "Glass Harbor": [
        "Glass Harbor is the debut studio album by Mira Solen, released in February 1994.",
        "The album contains eleven tracks.",
        "Glass Harbor reached position 4 on the Oriel Albums Chart.",
    ],
    "Veld Institute": [
        "The Veld Institute is a research institute founded in 1936.",
        "The institute studies wetland ecology.",
        "About 500 staff work at its Port Ellery campus.",
    ],
    "Bluewing Airlines": [
        "Bluewing Airlines is a regional carrier founded in 1972.",
        "The airline operates a fleet of 40 aircraft.",
        "Its hub is Port Ellery Field.",
    ],
    "Sorrel Lighthouse": [
        "Sorrel Lighthouse was completed in 1851 at the mouth of the Gulf of Sorrel.",
        "The tower stands 48 meters tall.",
        "The light was automated in 1984.",
    ],
    "Kestrel Theatre": [
        "The Kestrel Theatre is a playhouse that opened in 1894.",
        "Kestrel Theatre seats 1200 spectators.",
        "Its stage was rebuilt in 1999.",
    ],
    "Novera Museum": [
        "The Novera Museum was founded in 1921.",
        "The museum holds 30000 catalogued artifacts.",
        "Its bronze collection is famous across the region.",
    ],
    "Danforth Mill": [
        "Danforth Mill is a watermill built in 1840.",
        "The mill ground barley and wheat.",
        "Danforth Mill closed in 1984.",
    ],
    "Elm Court Castle": [
        "Elm Court Castle was completed in 1472.",
        "The castle keeps a water filled moat.",
        "Sixty rooms open onto its inner yard.",
    ],
    "Harrow Point Dam": [
        "Harrow Point Dam was finished in 1936 across the Tessio River.",
        "The dam rises 85 meters above its footing.",
        "Its turbines deliver 40 megawatts.",
    ],
    "Silver Fen Reserve": [
        "Silver Fen Reserve is a wetland reserve established in 1968.",
        "The reserve protects 120 bird species.",
        "It covers 15 square kilometers of fen.",
    ],
    "Corvid Pictures": [
        "Corvid Pictures is a film studio founded in 1948.",
        "The studio produced ninety features.",
        "Its drama Night Ferry appeared in 1953.",
    ],
    "Night Ferry": [
        "Night Ferry is a 1953 drama film directed by Lena Osk.",
        "The film runs 104 minutes.",
        "Night Ferry was produced by Corvid Pictures.",
    ],
    "Lena Osk": [
        "Lena Osk is a film director born in 1916.",
        "Osk collected four directing awards.",
    ],
    "The Copper Line": [
        "The Copper Line is a novel by Arno Vael published in 1963.",
        "The novel spans 312 pages.",
        "Translators rendered it into twelve languages.",
    ],
    "Arno Vael": [
        "Arno Vael is an author born in 1931.",
        "Vael wrote nine novels.",
    ],
    "Redstone Aqueduct": [
        "The Redstone Aqueduct is an ancient aqueduct of 14 stone arches.",
        "The aqueduct carries water 30 kilometers.",
    ],
    "Pallas Software": [
        "Pallas Software is a company founded in 1983.",
        "The firm builds harbor logistics systems.",
        "Pallas Software employs 700 people.",
    ],
    "Gulf of Sorrel": [
        "The Gulf of Sorrel is a bay 90 kilometers wide.",
        "Its fishing grounds support Port Ellery.",
    ],
    "Oriel Albums Chart": [
        "The Oriel Albums Chart is a weekly record chart established in 1966.",
    ],
    "Port Ellery Stadium": [
        "Port Ellery Stadium opened in 1930.",
        "The ground holds 18000 seated spectators.",
    ],
    # Distractor pages: never cited as evidence, but they share the vague
    # vocabulary that blurred or noised queries fall back on.
    "Veld Hills": [
        "The Veld Hills are a range of notable broad hills.",
        "Several notable passes cross the hills in broad terms.",
        "In broad terms the hills bound the Tessio valley.",
    ],
    "List of Notable Bridges": [
        "Notable bridges span several rivers and several straits.",
        "A notable bridge is, in broad terms, a crossing.",
        "Many notable bridges opened across several eras.",
    ],
    "Regional Timeline": [
        "Notable events include several openings in 1894, 1901, 1907, 1921 and 1930.",
        "Several notable institutions were founded across the region.",
        "In broad terms the timeline is notable for several gaps.",
    ],
    "Glossary of Broad Terms": [
        "In broad terms, a term is notable when several sources say so.",
        "Broad terms stay broad, and notable terms stay notable.",
        "Several broad terms cover several notable things.",
    ],
}

# Structured extras for the feverous-like dataset: cells and list items.
TABLES: dict[str, list[dict]] = {
    "Glass Harbor": [
        {"id": "cell_0_1_1", "value": "4", "header_path": ["Oriel Albums Chart", "Peak"]},
        {"id": "cell_0_2_1", "value": "1994", "header_path": ["Release", "Year"]},
    ],
    "Port Ellery": [
        {"id": "cell_0_1_1", "value": "101749", "header_path": ["Census", "2012"]},
    ],
    "Harrow Point Dam": [
        {"id": "cell_0_1_1", "value": "85 meters", "header_path": ["Structure", "Height"]},
        {"id": "cell_0_2_1", "value": "40 megawatts", "header_path": ["Power", "Output"]},
    ],
    "Halvern FC": [
        {"id": "cell_0_1_1", "value": "1899", "header_path": ["Club", "Founded"]},
    ],
}
LIST_ITEMS: dict[str, list[dict]] = {
    "Halvern FC": [
        {"id": "item_0", "text": "National Cup: four titles"},
        {"id": "item_1", "text": "Regional Shield: two titles"},
    ],
    "Silver Fen Reserve": [
        {"id": "item_0", "text": "Protected bird species: 120"},
    ],
}

# --- claims -----------------------------------------------------------------
# (claim text, label, [(page, sentence_index), ...])
FEVER_TEST: list[tuple[str, bool, list[tuple[str, int]]]] = [
    ("Arden Bridge opened in 1921.", True, [("Arden Bridge", 0)]),
    ("Arden Bridge spans the Tessio River.", True, [("Arden Bridge", 1)]),
    ("The Tessio River flows 120 kilometers.", True, [("Tessio River", 0)]),
    ("Calder Observatory was built in 1907.", True, [("Calder Observatory", 0)]),
    ("Halvern FC was founded in 1899.", True, [("Halvern FC", 0)]),
    ("Halvern FC claimed four national cups.", True, [("Halvern FC", 2)]),
    ("Sorrel Lighthouse was completed in 1851.", True, [("Sorrel Lighthouse", 0)]),
    ("The Kestrel Theatre holds 1200 spectators.", True, [("Kestrel Theatre", 1)]),
    ("The Novera Museum was established in 1921.", True, [("Novera Museum", 0)]),
    ("Danforth Mill shut in 1984.", True, [("Danforth Mill", 2)]),
    ("Elm Court Castle was finished in 1472.", True, [("Elm Court Castle", 0)]),
    ("Night Ferry runs 104 minutes.", True, [("Night Ferry", 1)]),
    ("The Copper Line was published in 1963.", True, [("The Copper Line", 0)]),
    (
        "Arden Bridge was demolished after violent storms swept the coast.",
        False,
        [("Arden Bridge", 0)],
    ),
    (
        "Lake Moreno dried out completely during one severe drought year.",
        False,
        [("Lake Moreno", 0)],
    ),
    (
        "Granite Peak Railway hauls freight trucks beneath highway viaducts.",
        False,
        [("Granite Peak Railway", 0)],
    ),
    (
        "Mira Solen retired from singing before recording anything else.",
        False,
        [("Mira Solen", 0)],
    ),
    (
        "Port Ellery banned timber exports throughout the entire postwar era.",
        False,
        [("Port Ellery", 1)],
    ),
    (
        "The Veld Institute trains alpine rescue dogs rather than ecologists.",
        False,
        [("Veld Institute", 0), ("Veld Institute", 1)],
    ),
    (
        "Bluewing Airlines grounded its whole fleet permanently last winter.",
        False,
        [("Bluewing Airlines", 1)],
    ),
    (
        "Harrow Point Dam collapsed shortly after its first test run.",
        False,
        [("Harrow Point Dam", 0)],
    ),
    (
        "Silver Fen Reserve sold most protected land to housing developers.",
        False,
        [("Silver Fen Reserve", 0)],
    ),
    (
        "Corvid Pictures never completed a single commissioned feature project.",
        False,
        [("Corvid Pictures", 0), ("Corvid Pictures", 1)],
    ),
    (
        "Lena Osk quit directing to manage a fishing cooperative.",
        False,
        [("Lena Osk", 0)],
    ),
    (
        "The Redstone Aqueduct was bombed flat during another border conflict.",
        False,
        [("Redstone Aqueduct", 0)],
    ),
]

FEVER_TRUE_TEMPLATES = [
    ("The Tessio River empties into the Gulf of Sorrel.", [("Tessio River", 1)]),
    ("Lake Moreno covers forty square kilometers of open water.", [("Lake Moreno", 0)]),
    ("Lake Moreno hosts the Bluewing Regatta every summer.", [("Lake Moreno", 1)]),
    ("The Granite Peak Railway opened in 1901.", [("Granite Peak Railway", 0)]),
    ("The Granite Peak Railway climbs 900 meters through seven tunnels.", [("Granite Peak Railway", 1)]),
    ("Halvern FC plays home matches at Port Ellery Stadium.", [("Halvern FC", 1)]),
    ("Port Ellery is a harbor city on the Gulf of Sorrel.", [("Port Ellery", 0)]),
    ("Port Ellery exports timber and salt.", [("Port Ellery", 1)]),
    ("Mira Solen released the debut album Glass Harbor in 1994.", [("Mira Solen", 0)]),
    ("Glass Harbor contains eleven tracks.", [("Glass Harbor", 1)]),
    ("The Veld Institute studies wetland ecology.", [("Veld Institute", 1)]),
    ("Bluewing Airlines operates a fleet of 40 aircraft.", [("Bluewing Airlines", 1)]),
    ("The Sorrel Lighthouse tower stands 48 meters tall.", [("Sorrel Lighthouse", 1)]),
    ("The Sorrel Lighthouse light was automated in 1984.", [("Sorrel Lighthouse", 2)]),
    ("The Kestrel Theatre opened in 1894.", [("Kestrel Theatre", 0)]),
    ("The Kestrel Theatre stage was rebuilt in 1999.", [("Kestrel Theatre", 2)]),
    ("The Novera Museum holds 30000 catalogued artifacts.", [("Novera Museum", 1)]),
    ("Danforth Mill ground barley and wheat.", [("Danforth Mill", 1)]),
    ("Harrow Point Dam rises 85 meters above its footing.", [("Harrow Point Dam", 1)]),
    ("Harrow Point Dam turbines deliver 40 megawatts.", [("Harrow Point Dam", 2)]),
    ("Silver Fen Reserve protects 120 bird species.", [("Silver Fen Reserve", 1)]),
    ("Corvid Pictures produced ninety features.", [("Corvid Pictures", 1)]),
    ("Night Ferry is a 1953 drama film directed by Lena Osk.", [("Night Ferry", 0)]),
    ("Lena Osk collected four directing awards.", [("Lena Osk", 1)]),
]

FEVER_FALSE_TEMPLATES = [
    ("The Tessio River vanished underground behind collapsed mine galleries.", [("Tessio River", 0)]),
    ("Calder Observatory melted down its telescope for scrap payments.", [("Calder Observatory", 1)]),
    ("Halvern FC merged into a chess federation decades ago.", [("Halvern FC", 0)]),
    ("Glass Harbor was recalled over damaged spindle pressings everywhere.", [("Glass Harbor", 0)]),
    ("The Veld Institute burned every archived survey notebook.", [("Veld Institute", 0)]),
    ("Sorrel Lighthouse toppled into heavy surf unnoticed overnight.", [("Sorrel Lighthouse", 0)]),
    ("The Novera Museum auctioned away entire storage vaults secretly.", [("Novera Museum", 0)]),
    ("Elm Court Castle drained its moat to farm carp commercially.", [("Elm Court Castle", 1)]),
    ("Pallas Software assembles racing bicycles under contract abroad.", [("Pallas Software", 1)]),
    ("The Copper Line plagiarized an unpublished survey pamphlet wholesale.", [("The Copper Line", 0)]),
    ("Arno Vael abandoned writing to breed carrier pigeons.", [("Arno Vael", 0)]),
    ("Port Ellery Stadium hosts submarine maintenance docks underneath.", [("Port Ellery Stadium", 0)]),
    ("Bluewing Airlines smuggled contraband cheese past customs patrols.", [("Bluewing Airlines", 0)]),
    ("Night Ferry survives only as burned reel fragments today.", [("Night Ferry", 0)]),
    ("The Redstone Aqueduct pumps seawater uphill for amusement rides.", [("Redstone Aqueduct", 1)]),
    ("The Gulf of Sorrel froze solid throughout an entire decade.", [("Gulf of Sorrel", 0)]),
]

# feverous-like claims carry sentence plus structured evidence.
FEVEROUS_DEV: list[tuple[str, bool, list[str]]] = [
    ("Glass Harbor climbed to position 4 on the Oriel Albums Chart.", True,
     ["Glass Harbor_sentence_2", "Glass Harbor_cell_0_1_1"]),
    ("Glass Harbor is the 1994 debut studio album by Mira Solen.", True,
     ["Glass Harbor_sentence_0", "Glass Harbor_cell_0_2_1"]),
    ("A 2012 census counted 101749 residents in Port Ellery.", True,
     ["Port Ellery_sentence_2", "Port Ellery_cell_0_1_1"]),
    ("Harrow Point Dam rises 85 meters and delivers 40 megawatts.", True,
     ["Harrow Point Dam_sentence_1", "Harrow Point Dam_cell_0_1_1",
      "Harrow Point Dam_cell_0_2_1"]),
    ("Halvern FC was founded in 1899 and won four national cups.", True,
     ["Halvern FC_sentence_0", "Halvern FC_cell_0_1_1", "Halvern FC_item_0"]),
    ("Silver Fen Reserve protects 120 bird species.", True,
     ["Silver Fen Reserve_sentence_1", "Silver Fen Reserve_item_0"]),
    ("The Kestrel Theatre opened in 1894 and seats 1200 spectators.", True,
     ["Kestrel Theatre_sentence_0", "Kestrel Theatre_sentence_1"]),
    ("Arden Bridge spans 310 meters between its abutments.", True,
     ["Arden Bridge_sentence_2"]),
    ("Bluewing Airlines has its hub at Port Ellery Field.", True,
     ["Bluewing Airlines_sentence_2"]),
    ("Pallas Software was founded in 1983.", True, ["Pallas Software_sentence_0"]),
    ("Pallas Software keeps 700 people employed.", True, ["Pallas Software_sentence_2"]),
    ("The Oriel Albums Chart was established in 1966.", True,
     ["Oriel Albums Chart_sentence_0"]),
    ("Port Ellery Stadium opened in 1930 and holds 18000 seated spectators.", True,
     ["Port Ellery Stadium_sentence_0", "Port Ellery Stadium_sentence_1"]),
    ("The Copper Line spans 312 pages.", True, [
        "The Copper Line_sentence_1"]),
    ("Glass Harbor topped every overseas chart for sixty straight weeks.", False,
     ["Glass Harbor_sentence_2", "Glass Harbor_cell_0_1_1"]),
    ("Port Ellery lost half its residents to an offshore exodus.", False,
     ["Port Ellery_sentence_2", "Port Ellery_cell_0_1_1"]),
    ("Harrow Point Dam never produced usable electricity at all.", False,
     ["Harrow Point Dam_sentence_2", "Harrow Point Dam_cell_0_2_1"]),
    ("Halvern FC forfeited every trophy over bribery charges.", False,
     ["Halvern FC_sentence_2", "Halvern FC_item_0"]),
    ("Silver Fen Reserve paved its marshes for cargo runways.", False,
     ["Silver Fen Reserve_sentence_0", "Silver Fen Reserve_item_0"]),
    ("The Kestrel Theatre burned down before any premiere.", False,
     ["Kestrel Theatre_sentence_0"]),
    ("Arden Bridge charges every pedestrian a silver coin.", False,
     ["Arden Bridge_sentence_0"]),
    ("Bluewing Airlines flies interplanetary cargo missions monthly.", False,
     ["Bluewing Airlines_sentence_0"]),
    ("Pallas Software breeds ornamental koi between releases.", False,
     ["Pallas Software_sentence_1"]),
    ("The Oriel Albums Chart ranks fishing boats by tonnage.", False,
     ["Oriel Albums Chart_sentence_0"]),
    ("Elm Court Castle floats on pontoons every spring tide.", False,
     ["Elm Court Castle_sentence_0"]),
]

FEVEROUS_TRAIN_TRUE = [
    ("Arden Bridge opened in 1921 across the Tessio River.",
     ["Arden Bridge_sentence_0", "Arden Bridge_sentence_1"]),
    ("The Tessio River flows 120 kilometers through the Veld Hills.",
     ["Tessio River_sentence_0"]),
    ("Lake Moreno covers forty square kilometers.", ["Lake Moreno_sentence_0"]),
    ("Calder Observatory catalogues variable stars.", ["Calder Observatory_sentence_2"]),
    ("The Granite Peak Railway opened in 1901.", ["Granite Peak Railway_sentence_0"]),
    ("Halvern FC plays at Port Ellery Stadium.", ["Halvern FC_sentence_1"]),
    ("Port Ellery exports timber and salt.", ["Port Ellery_sentence_1"]),
    ("Mira Solen toured with the Kestrel Theatre orchestra.", ["Mira Solen_sentence_1"]),
    ("Glass Harbor contains eleven tracks.", ["Glass Harbor_sentence_1"]),
    ("The Veld Institute was founded in 1936.", ["Veld Institute_sentence_0"]),
    ("About 500 staff work at the Veld Institute campus.", ["Veld Institute_sentence_2"]),
    ("Bluewing Airlines was founded in 1972.", ["Bluewing Airlines_sentence_0"]),
    ("Sorrel Lighthouse was completed in 1851.", ["Sorrel Lighthouse_sentence_0"]),
    ("The Novera Museum bronze collection is famous across the region.",
     ["Novera Museum_sentence_2"]),
    ("Danforth Mill is a watermill built in 1840.", ["Danforth Mill_sentence_0"]),
    ("Elm Court Castle keeps a water filled moat.", ["Elm Court Castle_sentence_1"]),
    ("Harrow Point Dam was finished in 1936.", ["Harrow Point Dam_sentence_0"]),
    ("Silver Fen Reserve was established in 1968.", ["Silver Fen Reserve_sentence_0"]),
    ("Corvid Pictures was founded in 1948.", ["Corvid Pictures_sentence_0"]),
    ("Night Ferry was produced by Corvid Pictures.", ["Night Ferry_sentence_2"]),
    ("Lena Osk was born in 1916.", ["Lena Osk_sentence_0"]),
    ("Arno Vael wrote nine novels.", ["Arno Vael_sentence_1"]),
]

FEVEROUS_TRAIN_FALSE = [
    ("Arden Bridge tolls repay ransom debts owed abroad.", ["Arden Bridge_sentence_0"]),
    ("The Tessio River reverses direction on festival mornings.", ["Tessio River_sentence_0"]),
    ("Lake Moreno hides submerged grain silos from medieval sieges.", ["Lake Moreno_sentence_0"]),
    ("Calder Observatory predicts lottery draws for subscribers.", ["Calder Observatory_sentence_0"]),
    ("The Granite Peak Railway runs entirely underwater now.", ["Granite Peak Railway_sentence_0"]),
    ("Port Ellery outlawed ships larger than rowboats.", ["Port Ellery_sentence_0"]),
    ("Mira Solen conducts military marching bands exclusively.", ["Mira Solen_sentence_0"]),
    ("The Veld Institute manufactures carnival fireworks wholesale.", ["Veld Institute_sentence_1"]),
    ("Sorrel Lighthouse broadcasts pirate radio serials nightly.", ["Sorrel Lighthouse_sentence_2"]),
    ("The Novera Museum displays only counterfeit replicas now.", ["Novera Museum_sentence_1"]),
    ("Danforth Mill grinds volcanic glass for jewelers.", ["Danforth Mill_sentence_1"]),
    ("Harrow Point Dam irrigates desert vineyards overseas.", ["Harrow Point Dam_sentence_0"]),
    ("Corvid Pictures shreds unsold prints into confetti.", ["Corvid Pictures_sentence_1"]),
    ("Lena Osk designs racing yachts between film shoots.", ["Lena Osk_sentence_0"]),
]

# --- WordNet-format mini lexicon ---------------------------------------------
# (pos letter, file suffix, synsets, index entries)
WORDNET_DATA = {
    "noun": [
        ("00001001", "n", ["bridge", "span"], "a structure carrying a road across an obstacle"),
        ("00001002", "n", ["river", "stream"], "a natural flowing watercourse"),
        ("00001003", "n", ["film", "movie", "picture"], "a story recorded for the screen"),
        ("00001004", "n", ["album", "record"], "a collection of recorded tracks"),
        ("00001005", "n", ["club", "society"], "an association of people"),
        ("00001006", "n", ["city", "metropolis"], "a large settlement"),
        ("00001007", "n", ["harbor", "haven"], "a sheltered port"),
        ("00001008", "n", ["railway", "railroad"], "a track for trains"),
        ("00001009", "n", ["museum", "gallery"], "a building that exhibits artifacts"),
        ("00001010", "n", ["novel", "book"], "a long work of fiction"),
        ("00001011", "n", ["singer", "vocalist"], "a person who sings"),
        ("00001012", "n", ["theatre", "playhouse"], "a building for staged performances"),
        ("00001013", "n", ["tower", "spire"], "a tall narrow structure"),
        ("00001014", "n", ["reserve", "preserve"], "protected land"),
        ("00001015", "n", ["fleet", "flotilla"], "a group of vehicles under one command"),
        ("00001016", "n", ["staff", "personnel"], "the employees of an organization"),
        ("00001017", "n", ["cups", "trophies"], "prize vessels awarded to winners"),
        ("00001018", "n", ["residents", "inhabitants"], "people dwelling in a place"),
        ("00001019", "n", ["spectators", "onlookers"], "people watching an event"),
        ("00001020", "n", ["tracks", "songs"], "recorded pieces on an album"),
    ],
    "verb": [
        ("00002001", "v", ["opened", "inaugurated"], "began operation"),
        ("00002002", "v", ["built", "constructed"], "assembled by labor"),
        ("00002003", "v", ["founded", "established"], "brought into being"),
        ("00002004", "v", ["spans", "crosses"], "extends across"),
        ("00002005", "v", ["covers", "blankets"], "extends over"),
        ("00002006", "v", ["flows", "runs"], "moves as a stream"),
        ("00002007", "v", ["holds", "contains"], "keeps within"),
        ("00002008", "v", ["protects", "safeguards"], "keeps from harm"),
        ("00002009", "v", ["exports", "ships"], "sends goods abroad"),
        ("00002010", "v", ["completed", "finished"], "brought to an end"),
    ],
    "adj": [
        ("00003001", "a", ["big", "large"], "of great size"),
        ("00003002", "a", ["old", "ancient"], "of great age"),
        ("00003003", "a", ["famous", "renowned"], "widely known"),
        ("00003004", "a", ["long", "lengthy"], "of great extent"),
        ("00003005", "a", ["small", "little"], "of limited size"),
        ("00003006", "a", ["national", "countrywide"], "of a whole nation"),
        ("00003007", "a", ["severe", "harsh"], "extreme in degree"),
        ("00003008", "a", ["debut", "maiden"], "first of its kind"),
    ],
    "adv": [
        ("00004001", "r", ["completely", "entirely"], "to the full extent"),
        ("00004002", "r", ["permanently", "forever"], "without end"),
    ],
}

CONFIG_TEXT = """\
experiment: fixture-demo
seed: 1234
out: ../out/fixture-demo
datasets:
  fever:
    format: fever
    files:
      train: fever_like/train.jsonl
      dev: fever_like/dev.jsonl
      test: fever_like/test.jsonl
  feverous:
    format: feverous
    files:
      train: feverous_like/train.jsonl
      dev: feverous_like/dev.jsonl
    dev_fraction: 0.15
page_store: pages.jsonl
attacks:
  lexical: [synonym, word_swap, char_noise]
  persuasion: all
  rate: 0.10
  wordnet_dir: wordnet_mini
generator:
  mode: mock
  model_name: mock-rewriter
  temperature: 0.0
  max_tokens: 128
  max_retries: 3
  parallelism: 2
scorers:
  claim_only:
    stub: overlap
  gold_evidence:
    stub: overlap
retrieval:
  corpus: pages.jsonl
  k: [3, 5, 7, 10]
  k1: 0.9
  b: 0.4
oracle_pool: persuasion
validation:
  per_technique: 4
"""


def write_jsonl(path: Path, records: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


def build_pages() -> list[dict]:
    records = []
    for page_id, sentences in PAGES.items():
        elements = {}
        body_parts = [page_id + "."]
        for i, sentence in enumerate(sentences):
            elements[f"sentence_{i}"] = {"kind": "sentence", "text": sentence}
            body_parts.append(sentence)
        for cell in TABLES.get(page_id, []):
            elements[f"{page_id}_{cell['id']}"] = {
                "kind": "table_cell",
                "value": cell["value"],
                "header_path": cell["header_path"],
            }
            body_parts.append(" ".join([*cell["header_path"], cell["value"]]))
        for item in LIST_ITEMS.get(page_id, []):
            elements[f"{page_id}_{item['id']}"] = {"kind": "list_item", "text": item["text"]}
            body_parts.append(item["text"])
        # feverous evidence ids also reference plain sentences by full id
        for i, sentence in enumerate(sentences):
            elements[f"{page_id}_sentence_{i}"] = {"kind": "sentence", "text": sentence}
        records.append({"page_id": page_id, "text": " ".join(body_parts), "elements": elements})
    return records


def fever_record(claim_id: int, text: str, label: bool | None, refs: list[tuple[str, int]]) -> dict:
    if label is None:
        return {
            "id": claim_id,
            "claim": text,
            "label": "NOT ENOUGH INFO",
            "verifiable": "NOT VERIFIABLE",
            "evidence": [[[claim_id * 10, claim_id * 10, None, None]]],
        }
    evidence = [[[claim_id * 10 + i, claim_id * 10 + i, page, idx]
                 for i, (page, idx) in enumerate(refs)]]
    return {
        "id": claim_id,
        "claim": text,
        "label": "SUPPORTS" if label else "REFUTES",
        "verifiable": "VERIFIABLE",
        "evidence": evidence,
    }


def feverous_record(claim_id: int, text: str, label: bool | None, element_ids: list[str]) -> dict:
    label_str = (
        "NOT ENOUGH INFO" if label is None else ("SUPPORTS" if label else "REFUTES")
    )
    return {
        "id": claim_id,
        "claim": text,
        "label": label_str,
        "evidence": [{"content": element_ids}],
    }


def build_fever_files() -> dict[str, list[dict]]:
    test = [
        fever_record(6000 + i, text, label, refs)
        for i, (text, label, refs) in enumerate(FEVER_TEST)
    ]
    train: list[dict] = []
    cid = 1000
    for text, refs in FEVER_TRUE_TEMPLATES:
        train.append(fever_record(cid, text, True, refs))
        cid += 1
    for text, refs in FEVER_FALSE_TEMPLATES:
        train.append(fever_record(cid, text, False, refs))
        cid += 1
    # a couple of not-enough-info lines exercise the drop rule
    train.append(fever_record(cid, "Granite Peak hides a second summit.", None, []))
    cid += 1
    train.append(fever_record(cid, "Port Ellery salt is exported in blue sacks.", None, []))
    dev = [
        fever_record(3000, "The Gulf of Sorrel is a bay 90 kilometers wide.", True,
                     [("Gulf of Sorrel", 0)]),
        fever_record(3001, "Pallas Software builds harbor logistics systems.", True,
                     [("Pallas Software", 1)]),
        fever_record(3002, "Arno Vael is an author born in 1931.", True, [("Arno Vael", 0)]),
        fever_record(3003, "Night Ferry runs 104 minutes.", True, [("Night Ferry", 1)]),
        fever_record(3004, "The Redstone Aqueduct carries water 30 kilometers.", True,
                     [("Redstone Aqueduct", 1)]),
        fever_record(3005, "Lake Moreno exports bottled glacier water worldwide.", False,
                     [("Lake Moreno", 0)]),
        fever_record(3006, "Calder Observatory rents telescopes for wedding parties.", False,
                     [("Calder Observatory", 1)]),
        fever_record(3007, "The Copper Line was banned aboard merchant vessels.", False,
                     [("The Copper Line", 0)]),
        fever_record(3008, "Halvern FC fields eleven goalkeepers simultaneously.", False,
                     [("Halvern FC", 0)]),
        fever_record(3009, "The Novera Museum charges admission in seashells.", False,
                     [("Novera Museum", 0)]),
    ]
    return {"train": train, "dev": dev, "test": test}


def build_feverous_files() -> dict[str, list[dict]]:
    dev = [
        feverous_record(8000 + i, text, label, element_ids)
        for i, (text, label, element_ids) in enumerate(FEVEROUS_DEV)
    ]
    train: list[dict] = []
    cid = 4000
    for text, element_ids in FEVEROUS_TRAIN_TRUE:
        train.append(feverous_record(cid, text, True, element_ids))
        cid += 1
    for text, element_ids in FEVEROUS_TRAIN_FALSE:
        train.append(feverous_record(cid, text, False, element_ids))
        cid += 1
    train.append(feverous_record(cid, "The Veld Hills hold iron seams.", None, []))
    return {"train": train, "dev": dev}


def build_wordnet(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    for pos, synsets in WORDNET_DATA.items():
        data_lines = []
        index: dict[str, list[str]] = {}
        for offset, ss_type, words, gloss in synsets:
            w_cnt = f"{len(words):02x}"
            word_fields = " ".join(f"{w} 0" for w in words)
            data_lines.append(f"{offset} 00 {ss_type} {w_cnt} {word_fields} 000 | {gloss}")
            for word in words:
                index.setdefault(word.lower(), []).append(offset)
        (out_dir / f"data.{pos}").write_text(
            "  1 header line mimicking the license block\n" + "\n".join(data_lines) + "\n",
            encoding="utf-8",
        )
        index_lines = []
        for lemma in sorted(index):
            offsets = index[lemma]
            pos_letter = {"noun": "n", "verb": "v", "adj": "a", "adv": "r"}[pos]
            index_lines.append(
                f"{lemma} {pos_letter} {len(offsets)} 1 & {len(offsets)} 0 "
                + " ".join(offsets)
            )
        (out_dir / f"index.{pos}").write_text(
            "  1 header line mimicking the license block\n" + "\n".join(index_lines) + "\n",
            encoding="utf-8",
        )


def main() -> None:
    write_jsonl(FIX / "pages.jsonl", build_pages())
    for split, records in build_fever_files().items():
        write_jsonl(FIX / "fever_like" / f"{split}.jsonl", records)
    for split, records in build_feverous_files().items():
        write_jsonl(FIX / "feverous_like" / f"{split}.jsonl", records)
    build_wordnet(FIX / "wordnet_mini")
    (FIX / "experiment.yaml").write_text(CONFIG_TEXT, encoding="utf-8")
    print(f"fixtures written under {FIX}")
    n_test = len(FEVER_TEST) + len(FEVEROUS_DEV)
    print(f"test claims: {len(FEVER_TEST)} + {len(FEVEROUS_DEV)} = {n_test}")


if __name__ == "__main__":
    main()
