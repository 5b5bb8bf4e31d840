import json

import pytest
from hypothesis import given, settings, strategies as st

from odm.annot import (
    AnnotationError, SceneAnnotation, TextInstance, annotation_to_dict, filter_weak,
    iter_canonical, parse_quad_file, parse_quad_line, parse_weak_line, read_canonical,
    write_canonical,
)
from odm.geom import BezierPair, Polygon, Quad


def test_parse_quad_basic():
    inst = parse_quad_line("0,0,10,0,10,5,0,5,hi")
    assert inst.shape == Quad(((0, 0), (10, 0), (10, 5), (0, 5)))
    assert inst.text == "hi" and not inst.ignore and inst.confidence is None


def test_parse_quad_ignore():
    assert parse_quad_line("0,0,10,0,10,5,0,5,###").ignore


def test_parse_quad_commas_in_text():
    line = "0,0,10,0,10,5,0,5,a,b"
    assert parse_quad_line(line).text == ",".join(line.split(",")[8:]) == "a,b"


def test_parse_quad_counter_clockwise_normalised():
    inst = parse_quad_line("0,0,0,5,10,5,10,0,x")
    assert inst.shape.area > 0 and inst.shape.points[0] == (0, 0)


@pytest.mark.parametrize("line,field", [("0,0,10,0,10,5,0,5", None), ("0,0,1O,0,10,5,0,5,t", "x2")])
def test_parse_quad_errors(line, field):
    with pytest.raises(AnnotationError) as exc:
        parse_quad_line(line, lineno=7)
    assert exc.value.line == 7 and exc.value.field == field


def test_parse_quad_file_lenient_counts():
    errors = []
    lines = ["0,0,10,0,10,5,0,5,ok", "garbage", "", "1,1,9,1,9,4,1,4,fine"]
    out = parse_quad_file(lines, lenient=True, errors=errors)
    assert [i.text for i in out] == ["ok", "fine"]
    assert len(errors) == 1 and errors[0].line == 2
    with pytest.raises(AnnotationError):
        parse_quad_file(lines)


def test_parse_weak_line():
    payload = [{"transcription": "Ridge", "points": [[0, 0], [40, 0], [40, 50], [0, 50]], "score": 0.97},
               {"transcription": "x", "points": [[0, 0], [5, 0], [9, 3], [5, 6], [0, 6], [0, 3]], "score": 0.5}]
    image_id, insts = parse_weak_line("img_7.jpg\t" + json.dumps(payload))
    assert image_id == "img_7.jpg"
    assert isinstance(insts[0].shape, Quad) and insts[0].confidence == 0.97
    assert isinstance(insts[1].shape, Polygon)
    with pytest.raises(AnnotationError, match="score"):
        parse_weak_line('a\t[{"transcription": "t", "points": [[0,0],[1,0],[1,1],[0,1]]}]')


# -- canonical -----------------------------------------------------------------------

FIXTURE = SceneAnnotation("img_1", 200, 100, (
    TextInstance(Quad(((10, 10), (90, 10), (90, 40), (10, 40))), "Hello"),
    TextInstance(Polygon(((0, 50), (40, 50), (40, 80))), "tri", 0.91),
    TextInstance(BezierPair.from_points([(100, 60), (130, 50), (160, 50), (190, 60),
                                         (100, 90), (130, 80), (160, 80), (190, 90)]), "curve"),
    TextInstance(Quad(((1, 1), (5, 1), (5, 5), (1, 5))), "###", ignore=True),
))


def test_round_trip(tmp_path):
    path = tmp_path / "a.jsonl"
    write_canonical([FIXTURE, FIXTURE], path)
    assert read_canonical(path) == [FIXTURE, FIXTURE]


def test_empty_file(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert read_canonical(path) == []


def test_missing_width_names_field(tmp_path):
    rec = annotation_to_dict(FIXTURE)
    del rec["width"]
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps(annotation_to_dict(FIXTURE)) + "\n" + json.dumps(rec) + "\n")
    with pytest.raises(AnnotationError) as exc:
        read_canonical(path)
    assert exc.value.field == "width" and exc.value.line == 2


def test_bezier_needs_eight_points():
    rec = annotation_to_dict(FIXTURE)
    rec["instances"][2]["points"] = rec["instances"][2]["points"][:6]
    with pytest.raises(AnnotationError, match="8 control points"):
        list(iter_canonical([json.dumps(rec)]))


def test_out_of_canvas_clamped():
    ann = SceneAnnotation("c", 50, 50, (TextInstance(Quad(((-3, -1), (60, 0), (60, 20), (0, 20))), "t"),))
    assert ann.instances[0].shape.points == ((0, 0), (50, 0), (50, 20), (0, 20))


coord = st.floats(-20, 300, allow_nan=False, allow_infinity=False)
texts = st.text(alphabet=st.characters(min_codepoint=32, max_codepoint=0x2FF), min_size=1, max_size=12)


@st.composite
def instances(draw):
    kind = draw(st.sampled_from(["quad", "polygon", "bezier"]))
    n = {"quad": 4, "bezier": 8}.get(kind) or draw(st.integers(3, 10))
    pts = [(draw(coord), draw(coord)) for _ in range(n)]
    shape = {"quad": Quad, "polygon": Polygon}.get(kind, BezierPair.from_points)(tuple(pts))
    conf = draw(st.none() | st.floats(0, 1))
    ignore = draw(st.booleans())
    return TextInstance(shape, draw(texts), conf, ignore)


@st.composite
def scenes(draw):
    return SceneAnnotation(draw(st.text(min_size=1, max_size=8)), draw(st.integers(1, 400)),
                           draw(st.integers(1, 400)), tuple(draw(st.lists(instances(), max_size=4))))


@settings(max_examples=60, deadline=None)
@given(st.lists(scenes(), max_size=3))
def test_round_trip_property(tmp_path_factory, anns):
    path = tmp_path_factory.mktemp("rt") / "x.jsonl"
    write_canonical(anns, path)
    assert read_canonical(path) == anns


@settings(max_examples=200, deadline=None)
@given(st.binary(max_size=200))
def test_parsers_never_panic(data):
    text = data.decode("utf-8", errors="replace")
    for fn in (lambda: parse_quad_line(text, 1),
               lambda: parse_weak_line(text, 1),
               lambda: list(iter_canonical(text.splitlines()))):
        try:
            fn()
        except AnnotationError:
            pass


@settings(max_examples=200, deadline=None)
@given(st.recursive(st.none() | st.booleans() | st.integers() | st.floats() | st.text(max_size=5),
                    lambda kids: st.lists(kids, max_size=4) | st.dictionaries(
                        st.sampled_from(["image_id", "width", "height", "instances", "kind",
                                         "points", "text", "conf", "ignore"]), kids, max_size=6),
                    max_leaves=20))
def test_canonical_reader_structured_errors(obj):
    try:
        list(iter_canonical([json.dumps(obj)]))
    except AnnotationError:
        pass


# -- weak filter ------------------------------------------------------------------------

def box(w, h):
    return Quad(((0, 0), (w, 0), (w, h), (0, h)))


def weak_scene(*specs):
    return SceneAnnotation("w", 1000, 1000, tuple(TextInstance(box(w, h), f"t{i}", c)
                                                   for i, (c, w, h) in enumerate(specs)))


def test_filter_keeps_confident_large():
    assert len(filter_weak(weak_scene((0.95, 100, 40))).instances) == 1


def test_filter_drops_exact_threshold():
    assert filter_weak(weak_scene((0.90, 100, 40))).instances == ()


def test_filter_drops_small():
    assert filter_weak(weak_scene((0.95, 300, 20))).instances == ()
    assert filter_weak(weak_scene((0.95, 300, 32))).instances == ()


def test_filter_preserves_order_and_input():
    ann = weak_scene((0.95, 100, 40), (0.5, 100, 40), (0.99, 50, 33), (0.91, 10, 100))
    out = filter_weak(ann)
    assert [i.text for i in out.instances] == ["t0", "t2"]
    assert len(ann.instances) == 4


def test_filter_vacuous_thresholds():
    ann = weak_scene((0.01, 1, 1), (0.5, 100, 40))
    assert filter_weak(ann, min_conf=0, min_size_px=0) == ann


def test_filter_requires_confidence():
    ann = SceneAnnotation("w", 100, 100, (TextInstance(box(50, 50), "t"),))
    with pytest.raises(AnnotationError, match="confidence"):
        filter_weak(ann)
