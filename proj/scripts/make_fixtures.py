#!/usr/bin/env python3
"""Writes the shipped data/ tree: lexicon, schema, toy networks, inputs,
replay fixtures, labeled eval sets and golden outputs.

Run once; the outputs are committed and treated as frozen. Everything here is
computed with numpy independently of the C++ code so the goldens can serve as
oracles for it.
"""

import hashlib
import json
import os
import sys

import numpy as np

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")


def path(*parts):
    p = os.path.join(ROOT, *parts)
    os.makedirs(os.path.dirname(p), exist_ok=True)
    return p


def write_json(rel, obj, indent=2):
    with open(path(rel), "w") as f:
        json.dump(obj, f, indent=indent)
        f.write("\n")


def write_text(rel, text):
    with open(path(rel), "w") as f:
        f.write(text)


# ---------------------------------------------------------------- lexicon

LEXICON = """\
# action<TAB>comma-separated trigger phrases; "..." allows a gap
remove\tmissing, occluded, occlude, removed, remove, covered, hidden, masked, absent, erased, blocked, cut out, not visible
add_noise\tnot clear, unclear, noisy, noisier, noise is added, blurry, blurred, grainy, corrupted, not sharp
increase_brightness\tbrighter, brightened, brighten, brightness ... increased, brightness ... raised, brightness ... higher
decrease_brightness\tdarker, darkened, darken, dimmer, brightness ... decreased, brightness ... reduced, brightness ... lower
increase_contrast\tmore contrast, higher contrast, contrast ... increased, contrast ... raised, contrast ... boosted
decrease_contrast\tless contrast, lower contrast, washed out, faded, contrast ... decreased, contrast ... reduced
rotate\trotated, rotate, tilted, turned sideways, upside down
scale_up\tenlarged, scaled up, zoomed in, magnified, bigger
scale_down\tshrunk, scaled down, zoomed out, smaller
increase\tmore, higher, increase, increased, increases, larger, bigger, longer, older, raised, greater
decrease\tfewer, less, lower, decrease, decreased, decreases, smaller, shorter, younger, reduced
change\tchange, changed, changes, different, differ, vary, varies, altered, modified
amplify\tlouder, amplified, amplify, boosted, volume ... increased, turned up, more audible
"""

# ---------------------------------------------------------------- schema

ATTRIBUTES = [
    ("Attribute2", "Duration (months)", 4, 72, ["duration", "loan duration", "months", "term"]),
    ("Attribute5", "Credit amount", 250, 18424, ["credit amount", "loan amount", "amount"]),
    ("Attribute8", "Installment rate as a percentage of disposable income", 1, 4,
     ["installment rate", "installment", "disposable income"]),
    ("Attribute11", "Present residence since", 1, 4, ["present residence", "residence"]),
    ("Attribute13", "Age (years)", 19, 75, ["age", "aged", "years old", "younger", "older"]),
    ("Attribute16", "Number of existing credits at this bank", 1, 4,
     ["existing credits", "number of credits", "credits at this bank"]),
    ("Attribute18", "Number of people liable to provide maintenance for", 1, 2,
     ["dependents", "dependent", "people liable", "maintenance"]),
]


def schema_json():
    return {
        "name": "statlog_german_credit",
        "input_dim": len(ATTRIBUTES),
        "attributes": [
            {"name": n, "description": d, "index": i, "raw_min": lo, "raw_max": hi, "aliases": al}
            for i, (n, d, lo, hi, al) in enumerate(ATTRIBUTES)
        ],
    }


def normalize(raw):
    return [(v - lo) / (hi - lo) for v, (_, _, lo, hi, _) in zip(raw, ATTRIBUTES)]


# ---------------------------------------------------------------- networks


def net_json(layers):
    return {
        "input_dim": int(layers[0][0].shape[1]),
        "layers": [
            {"weights": w.tolist(), "bias": b.tolist(), "activation": act} for w, b, act in layers
        ],
    }


def forward(layers, x):
    h = np.asarray(x, dtype=np.float64)
    for w, b, act in layers:
        h = w @ h + b
        if act == "relu":
            h = np.maximum(h, 0.0)
    return h


def credit_net():
    rng = np.random.default_rng(1307)
    w1 = rng.normal(0.0, 0.4, (8, 7))
    b1 = rng.normal(0.0, 0.1, 8)
    w2 = rng.normal(0.0, 0.4, (8, 8))
    b2 = rng.normal(0.0, 0.1, 8)
    w3 = rng.normal(0.0, 0.4, (2, 8))
    b3 = np.zeros(2)
    # unit 0 carries a "young applicant" feature: relu(1 - 5 * age)
    age = 4
    w1[0, :] = 0.0
    w1[0, age] = -5.0
    b1[0] = 1.0
    w2[0, :] = 0.0
    w2[:, 0] = 0.0
    w2[0, 0] = 1.0
    b2[0] = 0.0
    w3[:, 0] = [-2.0, 2.0]
    layers = [(w1, b1, "relu"), (w2, b2, "relu"), (w3, b3, "none")]
    # bias the output so the reference applicant is approved with margin 0.6
    ref = normalize(APPLICANTS["applicant_001"])
    y = forward(layers, ref)
    b3[0] = 0.6 - (y[0] - y[1])
    return layers


APPLICANTS = {
    # duration, amount, installment, residence, age, credits, liable
    "applicant_001": [24, 3500, 3, 2, 35, 1, 1],
    "applicant_002": [12, 1800, 2, 4, 45, 2, 1],
}


def bird_image():
    img = np.full((16, 16), 0.2)
    yy, xx = np.mgrid[0:16, 0:16]
    body = ((xx - 7.0) / 5.0) ** 2 + ((yy - 8.0) / 3.5) ** 2 <= 1.0
    img[body] = 0.6
    head = ((xx - 10.5) / 2.0) ** 2 + ((yy - 6.0) / 2.0) ** 2 <= 1.0
    img[head] = 0.65
    img[6:8, 12:15] = 0.9  # beak
    img[5, 10:12] = 0.1  # eye
    img[10:12, 1:4] = 0.45  # tail
    return img


def thorn_image():
    img = np.full((16, 16), 0.3)
    img[2:8, 6:10] = 0.55
    img[11:14, 2:5] = 0.8
    img[12:15, 10:13] = 0.75
    return img


def bird_net():
    rng = np.random.default_rng(4242)
    w1 = rng.normal(0.0, 0.02, (8, 256))
    b1 = rng.normal(0.0, 0.05, 8)
    w2 = rng.normal(0.0, 0.3, (2, 8))
    b2 = np.zeros(2)
    beak = np.zeros((16, 16))
    beak[6:8, 12:15] = 1.0
    eye = np.zeros((16, 16))
    eye[5, 10:12] = 1.0
    # unit 0 fires on a bright beak, unit 1 on a washed-out eye
    w1[0, :] = beak.ravel()
    b1[0] = -3.0
    w1[1, :] = 5.0 * eye.ravel()
    b1[1] = -1.5
    w2[:, 0] = [1.0, 0.0]
    w2[:, 1] = [0.0, 1.0]
    layers = [(w1, b1, "relu"), (w2, b2, "none")]
    y = forward(layers, bird_image().ravel())
    b2[0] = 1.0 - (y[0] - y[1])
    return layers


def siren_envelope():
    t = np.arange(32)
    env = 0.15 + 0.5 * np.exp(-((t - 6.0) / 3.0) ** 2) + 0.4 * np.exp(-((t - 26.0) / 3.0) ** 2)
    env[12:20] = 0.3
    return np.clip(env, 0.0, 1.0)


def audio_net():
    rng = np.random.default_rng(77)
    w1 = rng.normal(0.0, 0.05, (8, 32))
    b1 = rng.normal(0.0, 0.05, 8)
    w2 = rng.normal(0.0, 0.3, (3, 8))
    b2 = np.zeros(3)
    drill = np.zeros(32)
    drill[12:20] = 1.0
    # unit 0 counts drilling energy above 4.0
    w1[0, :] = drill
    b1[0] = -4.0
    w2[:, 0] = [0.0, 0.0, 1.0]
    layers = [(w1, b1, "relu"), (w2, b2, "none")]
    y = forward(layers, siren_envelope())
    b2[0] = 1.0 - (y[0] - max(y[1], y[2]))
    return layers


def toy_net():
    rng = np.random.default_rng(2)
    return [
        (rng.normal(0.0, 1.0, (2, 2)), rng.normal(0.0, 0.3, 2), "relu"),
        (rng.normal(0.0, 1.0, (2, 2)), rng.normal(0.0, 0.3, 2), "none"),
    ]


def sample(kind, values, shape, sid):
    return {"id": sid, "kind": kind, "shape": list(shape), "values": [float(v) for v in values]}


# ---------------------------------------------------------------- detector fixtures


def to_wire(box, w=16, h=16, box_score=0.5, text_score=0.4, phrase=""):
    x1, y1, x2, y2 = box
    return {
        "cx": (x1 + x2) / 2.0 / w,
        "cy": (y1 + y2) / 2.0 / h,
        "w": (x2 - x1) / w,
        "h": (y2 - y1) / h,
        "box_score": box_score,
        "text_score": text_score,
        "phrase": phrase,
    }


BEAK = (12, 6, 15, 8)
EYE = (10, 5, 12, 6)
THORN_A = (2, 11, 5, 14)
THORN_B = (10, 12, 13, 15)
THORN_CLUSTER = (1, 8, 15, 16)


def pipeline_detections():
    thorns = [
        to_wire(THORN_CLUSTER, box_score=0.30, text_score=0.25, phrase="purple thorns"),
        to_wire(THORN_A, box_score=0.45, text_score=0.40, phrase="purple thorns"),
        to_wire(THORN_B, box_score=0.20, text_score=0.18, phrase="purple thorns"),
    ]
    return {
        "bird_0001|beak": {"detections": [to_wire(BEAK, box_score=0.62, text_score=0.55, phrase="beak")]},
        "bird_0001|eye": {"detections": [to_wire(EYE, box_score=0.50, text_score=0.40, phrase="eye")]},
        "bird_0001|beak . tail": {"detections": [
            to_wire(BEAK, box_score=0.58, text_score=0.50, phrase="beak"),
            to_wire((1, 10, 4, 12), box_score=0.41, text_score=0.33, phrase="tail"),
        ]},
        "bird_0001|wings": {"detections": [to_wire((3, 6, 9, 10), box_score=0.09, text_score=0.07, phrase="wings")]},
        "cub_0042|purple thorns|loose": {"detections": thorns},
        "cub_0042|purple thorns|tight": {"detections": thorns},
        "cub_0042|purple thorn": {"detections": [
            to_wire(THORN_A, box_score=0.47, text_score=0.41, phrase="purple thorn")]},
        "cub_0042|purple thorn in the bottom": {"detections": [
            to_wire(THORN_B, box_score=0.51, text_score=0.44, phrase="purple thorn in the bottom")]},
        "cub_0042|thorn": {"detections": [
            to_wire(THORN_A, box_score=0.40, text_score=0.30, phrase="thorn"),
            to_wire(THORN_B, box_score=0.38, text_score=0.29, phrase="thorn"),
        ]},
    }


# Detection eval set. Each pattern fixes what the recorded detector returned for
# the detailed and the minimal query; the expected outcome per configuration
# (detailed/tight, detailed/loose, minimal/tight, minimal/loose) follows from
# the thresholds and is written next to the pattern for the hand count.
LABEL = (4, 4, 8, 8)
FAR = (11, 11, 15, 15)
BIG = (2, 2, 14, 14)
SMALL_IN_BIG = (5, 5, 7, 7)


def det_pattern(name):
    strong = [to_wire(LABEL, box_score=0.6, text_score=0.5)]
    weak = [to_wire(LABEL, box_score=0.25, text_score=0.2)]
    wrong = [to_wire(FAR, box_score=0.6, text_score=0.5)]
    wrong_weak = [to_wire(FAR, box_score=0.25, text_score=0.2)]
    faint = [to_wire(LABEL, box_score=0.1, text_score=0.1)]
    framed = [to_wire((0, 0, 16, 16), box_score=0.5, text_score=0.4), to_wire(LABEL, box_score=0.2, text_score=0.2)]
    big_with_speck = [to_wire(BIG, box_score=0.6, text_score=0.5), to_wire(SMALL_IN_BIG, box_score=0.2, text_score=0.2)]
    table = {
        "all": (strong, strong, [LABEL], (1, 1, 1, 1)),
        "loose": (weak, weak, [LABEL], (0, 1, 0, 1)),
        "detailed_loose_only": (weak, wrong_weak, [LABEL], (0, 1, 0, 0)),
        "none": (wrong, wrong, [LABEL], (0, 0, 0, 0)),
        "framed": (framed, framed, [LABEL], (0, 1, 0, 1)),
        "pruned_away": (big_with_speck, big_with_speck, [BIG], (1, 0, 1, 0)),
        "faint": (faint, faint, [LABEL], (0, 0, 0, 0)),
        "minimal_only": (wrong, strong, [LABEL], (0, 0, 1, 1)),
        "detailed_tight_only": (big_with_speck, wrong, [BIG], (1, 0, 0, 0)),
    }
    return table[name]


DETECT_ITEMS = [
    ("all", "red bird", "bird"),
    ("all", "black cat on the sofa", "cat"),
    ("all", "yellow taxi", "taxi"),
    ("all", "front wheels", "wheels"),
    ("all", "white sail", "sail"),
    ("loose", "small purple thorn", "thorn"),
    ("loose", "distant street sign", "sign"),
    ("detailed_loose_only", "left headlight", "headlight"),
    ("none", "open umbrella", "umbrella"),
    ("framed", "bird beak", "beak"),
    ("pruned_away", "parked truck", "truck"),
    ("multi", None, None),
    ("multi_minimal_miss", None, None),
    ("faint", "thin power line", "line"),
    ("minimal_only", "cloudy sky patch", "sky"),
    ("detailed_tight_only", "wooden fence", "fence"),
    ("all", "green traffic light", "light"),
    ("loose", "tiny insect", "insect"),
    ("none", "shadow of the tree", "shadow"),
    ("detailed_loose_only", "right rear mirror", "mirror"),
]


def detect_eval():
    items = []
    table = {}
    expected = []
    for k, (pattern, detailed, minimal) in enumerate(DETECT_ITEMS, start=1):
        iid = "det_%02d" % k
        if pattern in ("multi", "multi_minimal_miss"):
            beak, tail = (4, 4, 8, 8), (10, 9, 14, 13)
            both = [to_wire(beak, box_score=0.5, text_score=0.4, phrase="beak"),
                    to_wire(tail, box_score=0.5, text_score=0.4, phrase="tail")]
            items.append({
                "image_id": iid, "width": 16, "height": 16,
                "objects": {"detailed": ["sharp beak", "long tail"], "minimal": ["beak", "tail"]},
                "labeled_boxes": [{"label": "beak", "box": list(beak)}, {"label": "tail", "box": list(tail)}],
            })
            table[iid + "|sharp beak . long tail"] = {"detections": both}
            table[iid + "|beak . tail"] = {"detections": both if pattern == "multi" else both[:1]}
            expected.append((1, 1, 1, 1) if pattern == "multi" else (1, 1, 0, 0))
            continue
        det_d, det_m, labels, outcome = det_pattern(pattern)
        items.append({
            "image_id": iid, "width": 16, "height": 16,
            "objects": {"detailed": [detailed], "minimal": [minimal]},
            "labeled_boxes": [{"label": minimal, "box": list(b)} for b in labels],
        })
        table[iid + "|" + detailed] = {"detections": det_d}
        table[iid + "|" + minimal] = {"detections": det_m}
        expected.append(outcome)
    return {"items": items}, table, expected


# ---------------------------------------------------------------- parse eval

# (template, prompt, detailed objects, minimal objects, action)
PARSE_ITEMS = [
    ("visual", "Check that the classification of the pedestrian is correct even if the cars are not clear.",
     ["cars"], ["cars"], "add_noise"),
    ("visual", "check that the bird is classified correctly if both the beak and the tail are missing.",
     ["beak", "tail"], ["beak", "tail"], "remove"),
    ("visual", "is it possible that the car is misclassified when the brightness of its front wheels is increased?",
     ["front wheels"], ["wheels"], "increase_brightness"),
    ("visual", "The bird is classified correctly even if its beak is occluded.", ["beak"], ["beak"], "remove"),
    ("visual", "Can the prediction change if the purple thorn in the bottom is noisier?",
     ["purple thorn in the bottom"], ["thorn"], "add_noise"),
    ("visual", "Can the prediction change if all the purple thorns in the image are partially occluded?",
     ["purple thorns"], ["thorns"], "remove"),
    ("visual", "Can the prediction change if both beak and legs are missing?", ["beak", "legs"], ["beak", "legs"],
     "remove"),
    ("visual", "Is the dog still recognized when the grass is darker?", ["grass"], ["grass"], "decrease_brightness"),
    ("visual", "The truck must be detected even if the contrast of the sky is reduced.", ["sky"], ["sky"],
     "decrease_contrast"),
    ("visual", "Verify the cat label is stable if the collar is rotated.", ["collar"], ["collar"], "rotate"),
    ("visual", "Does the classifier still see a stop sign when the sign is scaled down?", ["stop sign"], ["sign"],
     "scale_down"),
    ("visual", "The horse should be classified correctly even if the fence behind it is blurry.", ["fence"],
     ["fence"], "add_noise"),
    ("visual", "Is the airplane still classified correctly if the clouds get brighter?", ["clouds"], ["clouds"],
     "increase_brightness"),
    ("visual", "Check the robustness of the zebra classification when the stripes have more contrast.",
     ["stripes"], ["stripes"], "increase_contrast"),
    ("tabular", "Could I get the loan if I had fewer dependents?", ["Attribute18"], ["Attribute18"], "decrease"),
    ("tabular", "The credit decision should not change for applicants younger than 50.", ["Attribute13"],
     ["Attribute13"], "change"),
    ("tabular", "Would the outcome differ if the loan duration were longer?", ["Attribute2"], ["Attribute2"],
     "increase"),
    ("tabular", "Is the application still approved if the credit amount increases?", ["Attribute5"],
     ["Attribute5"], "increase"),
    ("audio", "The emergency siren is detected even if drilling noise is louder.", ["drilling noise"], ["noise"],
     "amplify"),
    ("audio", "The dog bark is still recognized when the traffic sounds are amplified.", ["traffic sounds"],
     ["sounds"], "amplify"),
]

# Recorded chat-model answers. Deviations from the labels are deliberate and
# listed per mode so the expected accuracies can be counted by hand.
LLM_OVERRIDES = {
    "detailed": {
        4: ("purple thorn", "add_noise"),          # object wrong
        8: ("sky", "decrease_brightness"),         # action wrong
        19: ("traffic", "amplify"),                # object wrong
    },
    "minimal": {
        5: ("purple thorns", "remove"),            # object wrong
        8: ("sky", "decrease_brightness"),         # action wrong
        13: ("stripes", "increase_brightness"),    # action wrong
    },
}
FENCED = {2, 10, 16}


def llm_response(template, objects, action, fenced):
    key = "attribute" if template == "tabular" else "object"
    body = json.dumps({key: " . ".join(objects), "action": action}, indent=2)
    return "```json\n" + body + "\n```" if fenced else body


def llm_fixtures():
    out = {}
    for mode in ("detailed", "minimal"):
        table = {}
        for k, (template, prompt, det, mini, action) in enumerate(PARSE_ITEMS):
            objs = det if mode == "detailed" else mini
            if k in LLM_OVERRIDES[mode]:
                o, a = LLM_OVERRIDES[mode][k]
                objs, action = [o], a
            table[hashlib.sha256(prompt.encode()).hexdigest()] = llm_response(template, objs, action, k in FENCED)
        out[mode] = table
    return out


# ---------------------------------------------------------------- VNN-LIB goldens


def vnnlib_number(v):
    v = float(v)
    if v == 0.0:
        v = 0.0
    exponent = int(("%.16e" % v).split("e")[1])
    return "%.*f" % (max(1, 16 - exponent), v)


def vnnlib(lower, upper, ref_id, target, m):
    n = len(lower)
    lines = ["; grounded local robustness query", "; reference: " + ref_id, "; target class: %d" % target, ""]
    lines += ["(declare-const X_%d Real)" % i for i in range(n)] + [""]
    lines += ["(declare-const Y_%d Real)" % j for j in range(m)] + [""]
    lines += ["(assert (and (>= X_%d %s) (<= X_%d %s)))" % (i, vnnlib_number(lower[i]), i, vnnlib_number(upper[i]))
              for i in range(n)]
    lines += ["", "(assert (or" + "".join(" (>= Y_%d Y_%d)" % (j, target) for j in range(m) if j != target) + "))"]
    return "\n".join(lines) + "\n"


def grounded(lower, upper, ref, target, spec, regions, source):
    return {
        "lower": [float(v) for v in lower],
        "upper": [float(v) for v in upper],
        "target_class": int(target),
        "reference": ref,
        "provenance": {"spec": spec, "grounding": {"regions": regions, "source": source}},
    }


def main():
    write_text("lexicon.tsv", LEXICON)
    write_json("statlog_schema.json", schema_json())

    nets = {
        "credit_net": credit_net(),
        "bird_net": bird_net(),
        "audio_net": audio_net(),
        "toy_net": toy_net(),
    }
    for name, layers in nets.items():
        write_json("nets/%s.json" % name, net_json(layers), indent=None)

    inputs = {}
    for sid, raw in APPLICANTS.items():
        inputs[sid] = sample("tabular_vector", normalize(raw), [7], sid)
    inputs["bird_0001"] = sample("image_grayscale", bird_image().ravel(), [16, 16], "bird_0001")
    inputs["cub_0042"] = sample("image_grayscale", thorn_image().ravel(), [16, 16], "cub_0042")
    inputs["siren_0007"] = sample("audio_waveform", siren_envelope(), [32], "siren_0007")
    inputs["toy_point"] = sample("tabular_vector", [0.25, 0.75], [2], "toy_point")
    for sid, s in inputs.items():
        write_json("inputs/%s.json" % sid, s, indent=None)

    write_json("fixtures/audio_intervals.json", {
        "siren_0007|drilling noise": {"intervals": [{"t_start": 12, "t_end": 20, "label": "drilling noise", "score": 0.81}]},
        "siren_0007|noise": {"intervals": [{"t_start": 12, "t_end": 20, "label": "noise", "score": 0.77}]},
    })
    for mode, table in llm_fixtures().items():
        write_json("fixtures/llm_%s.json" % mode, table)

    write_json("fixtures/parse_eval.json", {"items": [
        {"prompt": p, "template": t, "expected_action": a, "expected_objects": {"detailed": d, "minimal": m}}
        for t, p, d, m, a in PARSE_ITEMS
    ]})
    det_items, det_table, det_expected = detect_eval()
    write_json("fixtures/detect_eval.json", det_items)
    detections = pipeline_detections()
    detections.update(det_table)
    write_json("fixtures/detections.json", detections)
    sums = [sum(o[c] for o in det_expected) for c in range(4)]
    any_ = sum(1 for o in det_expected if any(o))
    print("detect eval expected (DT, DL, MT, ML, any):", sums, any_, file=sys.stderr)

    # golden forward outputs
    fwd = {}
    for net, sid in [("credit_net", "applicant_001"), ("credit_net", "applicant_002"), ("bird_net", "bird_0001"),
                     ("audio_net", "siren_0007"), ("toy_net", "toy_point")]:
        fwd["%s/%s" % (net, sid)] = forward(nets[net], inputs[sid]["values"]).tolist()
    write_json("golden/forward.json", fwd)

    # golden grounded specs and their VNN-LIB text
    specs = {}
    x = inputs["toy_point"]
    target = int(np.argmax(forward(nets["toy_net"], x["values"])))
    specs["toy_degenerate"] = ("toy_net", grounded(
        x["values"], x["values"], x, target,
        {"objects": ["x0"], "operation": "change", "domain_hint": "tabular"},
        [{"type": "feature_range", "index": 0, "lower": 0.25, "upper": 0.25, "label": "x0", "score": 1.0}],
        "schema"))

    x = inputs["applicant_001"]
    age_hi = (50 - 19) / (75 - 19)
    lower, upper = list(x["values"]), list(x["values"])
    lower[4], upper[4] = 0.0, age_hi
    target = int(np.argmax(forward(nets["credit_net"], x["values"])))
    specs["credit_age"] = ("credit_net", grounded(
        lower, upper, x, target,
        {"objects": ["Attribute13"], "operation": "change", "domain_hint": "tabular",
         "bound": {"lower": None, "upper": 50.0}},
        [{"type": "feature_range", "index": 4, "lower": 0.0, "upper": age_hi, "label": "Attribute13", "score": 1.0}],
        "schema"))

    x = inputs["siren_0007"]
    v = np.array(x["values"])
    amp = np.clip(2.0 * v, 0.0, 1.0)
    lower, upper = v.copy(), v.copy()
    lower[12:20] = np.minimum(v[12:20], amp[12:20])
    upper[12:20] = np.maximum(v[12:20], amp[12:20])
    target = int(np.argmax(forward(nets["audio_net"], x["values"])))
    specs["siren_amplify"] = ("audio_net", grounded(
        lower, upper, x, target,
        {"objects": ["drilling noise"], "operation": "amplify", "domain_hint": "audio"},
        [{"type": "time_interval", "t_start": 12, "t_end": 20, "label": "drilling noise", "score": 0.81}],
        "fixture"))

    for name, (net, spec) in specs.items():
        write_json("golden/%s.spec.json" % name, spec, indent=None)
        m = len(nets[net][-1][1])
        write_text("golden/%s.vnnlib" % name,
                   vnnlib(spec["lower"], spec["upper"], spec["reference"]["id"], spec["target_class"], m))


if __name__ == "__main__":
    main()
