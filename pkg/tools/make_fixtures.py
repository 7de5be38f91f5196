"""Regenerate the shipped gold dataset fixtures under data/.

Source of truth: the published per-relation score tables (object->room
conditional probabilities, part->whole lists, object->verb scores).
"""

from pathlib import Path

from relprobe.datasets import RelationDataset, Record, save_dataset

DATA = Path(__file__).resolve().parent.parent / "data"

ROOM = {
    "bathroom": [
        ("toilet", 1.00), ("bathtub", 1.00), ("toothbrush holder", 1.00),
        ("toothpaste", 1.00), ("shower curtain", 1.00), ("toothbrush", 0.97),
        ("towel rod", 0.96), ("toilet paper", 0.96), ("squeeze tube", 0.95),
        ("faucet handle", 0.82),
    ],
    "bedroom": [
        ("dresser", 1.00), ("night stand", 1.00), ("headboard", 1.00),
        ("bed", 0.97), ("alarm clock", 0.97), ("laundry basket", 0.86),
        ("hat", 0.74), ("doll", 0.70), ("stuffed animal", 0.60), ("pillow", 0.56),
    ],
    "kitchen": [
        ("drying rack", 1.00), ("kitchen island", 1.00), ("pot", 1.00),
        ("frying pan", 1.00), ("spice rack", 1.00), ("cutting board", 1.00),
        ("blender", 1.00), ("knife", 1.00), ("stove", 0.98), ("dishwasher", 0.97),
    ],
    "living room": [
        ("coffee table", 0.94), ("ottoman", 0.93), ("fireplace", 0.87),
        ("dvd player", 0.69), ("sofa", 0.68), ("decorative plate", 0.61),
        ("tv stand", 0.57), ("blanket", 0.55), ("television", 0.53),
        ("remote control", 0.50),
    ],
    "office": [
        ("whiteboard", 1.00), ("room divider", 0.94), ("stapler", 0.92),
        ("cork board", 0.92), ("file", 0.88), ("keyboard", 0.85),
        ("mouse", 0.84), ("pen", 0.83), ("computer", 0.82), ("column", 0.81),
    ],
}

PART = {
    "bed": [
        "pillow", "bolster", "mattress cover", "leg", "box spring", "headboard",
        "mattress", "pillow protector", "elastic", "footboard",
    ],
    "dishwasher": [
        "drain hose", "overflow protection switch", "tub", "pump", "gasket",
        "water hose", "heating element", "rack", "cutlery basket", "wash tower",
        "motor", "detergent dispenser", "slide", "leveling foot",
        "insulating material", "spray arm", "rinse-aid dispenser",
    ],
    "door": [
        "lock", "cornice", "hanging stile", "entablature", "top rail",
        "middle panel", "bottom rail", "panel", "jamb", "doorknob", "threshold",
        "weatherboard", "lock rail", "shutting stile", "header",
    ],
    "mortise lock": [
        "ring", "keyway", "cotter pin", "spring", "rotor", "cylinder case",
        "key", "faceplate", "dead bolt", "cylinder", "stator", "strike plate",
    ],
    "refrigerator": [
        "switch", "refrigerator compartment", "egg tray", "shelf channel",
        "magnetic gasket", "storage door", "freezer door", "guard rail",
        "crisper", "glass cover", "butter compartment", "thermostat control",
        "freezer compartment", "ice cube tray", "meat keeper", "door stop",
        "shelf", "dairy compartment", "door shelf",
    ],
    "toilet": [
        "valve seat shaft", "tank lid", "conical washer", "lift chain", "seat",
        "shutoff valve", "trip lever", "ball-cock supply valve", "toilet bowl",
        "flush handle", "wax seal", "tank ball", "float ball", "filler tube",
        "waste pipe", "seat cover", "cold-water supply line", "overflow tube",
        "trap", "refill tube",
    ],
}

VERB = {
    "eat": [
        ("food", 0.13), ("diet", 0.08), ("meal", 0.07), ("breakfast", 0.04),
        ("balanced diet", 0.03), ("fruit", 0.03), ("vegetable", 0.03),
        ("plenty", 0.03), ("protein", 0.03), ("snack", 0.02),
    ],
    "listen to": [
        ("music", 0.22), ("song", 0.03), ("body", 0.03), ("side", 0.02),
        ("partner", 0.02), ("child", 0.02), ("perspective", 0.02),
        ("response", 0.02), ("parent", 0.02), ("people", 0.02),
    ],
    "play": [
        ("game", 0.27), ("music", 0.06), ("note", 0.04), ("sport", 0.03),
        ("chord", 0.02), ("song", 0.02), ("video game", 0.02), ("card", 0.02),
        ("role", 0.02), ("video", 0.02),
    ],
    "read": [
        ("book", 0.08), ("label", 0.06), ("instruction", 0.05), ("review", 0.04),
        ("body language", 0.02), ("rule", 0.02), ("example", 0.02),
        ("complaint", 0.01), ("law", 0.01), ("story", 0.01),
    ],
    "wash with": [
        ("soap", 0.29), ("water", 0.29), ("vinegar", 0.04), ("solution", 0.03),
        ("detergent", 0.03), ("baking soda", 0.03), ("cream", 0.02),
        ("shampoo", 0.02), ("towel", 0.02), ("cold water", 0.02),
    ],
    "wear": [
        ("clothing", 0.07), ("glove", 0.06), ("shoe", 0.05), ("clothes", 0.05),
        ("shirt", 0.02), ("makeup", 0.02), ("gear", 0.02), ("boot", 0.02),
        ("dress", 0.02), ("sock", 0.02),
    ],
}


def main() -> None:
    DATA.mkdir(exist_ok=True)

    room = RelationDataset(
        relation_name="room",
        targets=list(ROOM),
        records=[Record(src, tgt, gold) for tgt, pairs in ROOM.items() for src, gold in pairs],
    )
    save_dataset(room, DATA / "room.json")

    part = RelationDataset(
        relation_name="part",
        targets=list(PART),
        records=[Record(src, tgt, 1.00) for tgt, parts in PART.items() for src in parts],
    )
    save_dataset(part, DATA / "part.json")

    verb = RelationDataset(
        relation_name="verb",
        targets=list(VERB),
        records=[Record(src, tgt, gold) for tgt, pairs in VERB.items() for src, gold in pairs],
    )
    save_dataset(verb, DATA / "verb.json")

    for name in ("room", "part", "verb"):
        print(name, (DATA / f"{name}.json").stat().st_size, "bytes")


if __name__ == "__main__":
    main()
