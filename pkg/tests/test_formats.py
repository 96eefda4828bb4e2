import json
import math

import numpy as np
import pytest

from modulus_lab import CellSpace, Grid, Measure, MeasureSystem, Metric, SchemaError, rectangle_family, solve
from modulus_lab import formats
from modulus_lab.certificate import build_certificate
from modulus_lab.geometry import TransboundaryDomain


def test_dumps_round_trips_doubles():
    xs = [0.1, 1 / 3, 2.0 ** -60, 1e300, -7.0, math.inf, math.nan]
    back = json.loads(formats.dumps({"x": xs}))["x"]
    assert back[:5] == xs[:5]
    assert back[5] == "inf" and back[6] == "nan"


def test_problem_round_trip_and_hash():
    g = Grid(1.0, 2.0, 3, 4)
    sys0 = rectangle_family(g, "Gamma0")
    d = formats.problem_to_dict(g.space, sys0, g)
    parsed = formats.parse_problem(json.loads(formats.dumps(d)))
    assert parsed["space"] == g.space
    assert all(a == b for a, b in zip(parsed["system"], sys0))
    assert parsed["grid"] == g
    h = formats.problem_hash(g.space, sys0)
    assert h == formats.problem_hash(parsed["space"], parsed["system"])
    assert h != formats.problem_hash(g.space, sys0.scaled(2.0))


@pytest.mark.parametrize("doc,field", [
    ({"cells": {"weights": [1]}, "measures": [], "extra": 1}, "extra"),
    ({"cells": {"weights": [1], "atom": []}, "measures": []}, "cells.atom"),
    ({"cells": {"weights": [1]}, "measures": [{"entries": {"0": 1}, "foo": 2}]}, "measures[0].foo"),
    ({"cells": {"weights": [1]}, "measures": [{"entries": {"3": 1}}]}, "measures[0].entries.3"),
    ({"cells": {"weights": [1]}, "measures": [{"entries": {"0": -1}}]}, "measures[0].entries.0"),
    ({"cells": {"weights": [1]}}, "measures"),
])
def test_problem_schema_errors_name_the_field(doc, field):
    with pytest.raises(SchemaError) as exc:
        formats.parse_problem(doc)
    assert exc.value.field == field


def test_json_syntax_error_has_location():
    with pytest.raises(SchemaError, match="line 2"):
        formats.loads('{"a": 1,\n oops}')


def test_report_and_certificate_round_trip():
    g = Grid(1.0, 2.0, 2, 4)
    sys0 = rectangle_family(g, "Gamma0")
    r = solve(sys0, g.space, 2.0)
    d = json.loads(formats.dumps(formats.report_to_dict(r, "abc", g)))
    back = formats.parse_report(d)
    assert back["value"] == r.value and back["metric"] == r.metric
    assert np.array_equal(back["dual"], r.dual) and back["grid"] == g
    cert = build_certificate(sys0, g.space, r)
    c2 = formats.parse_certificate(json.loads(formats.dumps(formats.certificate_to_dict(cert))))
    assert c2 == cert
    explicit = {"p": 2, "family": [{"measure": {"0": 1.0}, "scale": 0.5, "lambda": 1.0}]}
    assert formats.parse_certificate(explicit).family[0].measure == Measure([0], [1.0])
    with pytest.raises(SchemaError):
        formats.parse_certificate({"p": 2, "family": [{"row": 0, "measure": {}, "scale": 1, "lambda": 1}]})


def test_infinite_value_round_trip():
    s = CellSpace.uniform(2)
    r = solve(MeasureSystem((Measure(),), allow_empty=True), s, 2.0)
    d = json.loads(formats.dumps(formats.report_to_dict(r)))
    assert d["value"] == "inf"
    assert math.isinf(formats.parse_report(d)["value"])


def test_csv_export():
    g = Grid(1.0, 1.0, 3, 2)
    phi = Metric(np.arange(6.0))
    assert formats.metric_csv(phi, g) == "0,1,2\n3,4,5\n"
    assert formats.metric_csv(phi) == "0,1,2,3,4,5\n"
    dom = TransboundaryDomain(g, (frozenset([4]),))
    tb = Metric([0.0, 1.0, 2.0, 3.0, 5.0, 9.0])
    assert formats.metric_csv(tb, g, dom) == "0,1,2\n3,9,5\natoms,9\n"
    assert formats.metric_csv(Metric.zeros(6), g) == "0,0,0\n0,0,0\n"


def test_pgm_export():
    g = Grid(1.0, 1.0, 3, 2)
    data = formats.metric_pgm(Metric(np.arange(6.0)), g)
    header = b"P5\n3 2\n255\n"
    assert data.startswith(header)
    pix = np.frombuffer(data[len(header):], dtype=np.uint8)
    assert list(pix) == [153, 204, 255, 0, 51, 102]
    zero = formats.metric_pgm(Metric.zeros(6), g)
    assert set(zero[len(header):]) == {0}
    const = formats.metric_pgm(Metric.constant(6, 0.7), g)
    assert set(const[len(header):]) == {255}
