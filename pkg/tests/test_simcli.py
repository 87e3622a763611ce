import pytest

from motoguard.imaging import GrayImage, load_pgm, save_pgm
from motoguard.simcli import (
    MalformedLine,
    ScenarioEvent,
    cli_main,
    parse_scenario,
    render_trace,
    run_scenario,
    upload_stub,
)
from motoguard.storage import save_config, save_facedb

from conftest import OWNER
from oracles import fnv1a_reference


def test_upload_stub():
    assert upload_stub(b"") == "https://sim.local/img/cbf29ce484222325"
    assert upload_stub(b"a") == "https://sim.local/img/af63dc4c8601ec8c"
    assert upload_stub(b"abc") == upload_stub(b"abc")


@pytest.mark.parametrize("data", [b"foobar", bytes(range(256)), b"\x00" * 17])
def test_upload_stub_matches_reference(data):
    assert upload_stub(data).endswith("%016x" % fnv1a_reference(data))


def test_parse_scenario_basic():
    events = parse_scenario("0 KEY 4\n10 KEY ENTER")
    assert [(e.t, e.kind, e.payload) for e in events] == [(0, "KEY", "4"), (10, "KEY", "ENTER")]


def test_parse_sms_keeps_body():
    [ev] = parse_scenario("5 SMS +63917 IGNITE")
    assert ev == ScenarioEvent(5, "SMS", "+63917 IGNITE", 1)
    [ev] = parse_scenario("5 SMS +63917 where   are you")
    assert ev.payload == "+63917 where   are you"


def test_parse_sorts_stably():
    events = parse_scenario("# header\n\n20 ENGINE_OFF\n5 KEY 1\n5 KEY 2\n")
    assert [(e.t, e.payload) for e in events] == [(5, "1"), (5, "2"), (20, "")]


@pytest.mark.parametrize(
    "text, line_no",
    [
        ("x CAMERA a.pgm", 1),
        ("0 KEY 1\n1 KEY 12", 2),
        ("0 JUMP", 1),
        ("0 SMS", 1),
        ("0 NMEA", 1),
        ("0 ENGINE_OFF now", 1),
        ("-5 KEY 1", 1),
        ("7", 1),
    ],
)
def test_parse_errors(text, line_no):
    with pytest.raises(MalformedLine) as err:
        parse_scenario(text)
    assert err.value.line_no == line_no


def test_run_scenario_face_paths(tmp_path, config, facedb, owner_face, stranger_face):
    (tmp_path / "owner.pgm").write_bytes(save_pgm(owner_face))
    (tmp_path / "stranger.pgm").write_bytes(save_pgm(stranger_face))
    trace = run_scenario("0 CAMERA stranger.pgm\n100 CAMERA owner.pgm\n", config, facedb, tmp_path)
    text = render_trace(trace)
    url = upload_stub(save_pgm(stranger_face))
    assert text.splitlines() == [
        "0 READY controller initialized",
        "0 EVENT CAMERA stranger.pgm",
        f"0 EVENT UPLOAD {url}",
        f"0 SMS_OUT {OWNER} INTRUDER attempt - photo: {url}",
        "100 EVENT CAMERA owner.pgm",
        "100 IGNITE engine started",
    ]


def test_run_scenario_reports_missing_image(tmp_path, config, facedb):
    trace = run_scenario("0 CAMERA nope.pgm\n5 SMS +1 hi\n", config, facedb, tmp_path)
    tags = [line.tag for line in trace]
    assert tags == ["READY", "EVENT", "ERROR", "EVENT"]


def test_run_scenario_accepts_ppm(tmp_path, config, facedb, owner_face):
    rgb = bytes(v for p in owner_face.data for v in (p, p, p))
    (tmp_path / "o.ppm").write_bytes(b"P6\n64 64\n255\n" + rgb)
    trace = run_scenario("0 CAMERA o.ppm", config, facedb, tmp_path)
    assert trace[-1].tag == "IGNITE"


def test_trace_timestamps_non_decreasing(tmp_path, config, facedb):
    trace = run_scenario("30 KEY 1\n10 KEY ENTER\n20 ENGINE_OFF\n", config, facedb, tmp_path)
    ts = [line.t for line in trace]
    assert ts == sorted(ts)


@pytest.fixture
def files(tmp_path, config, facedb, owner_face, stranger_face):
    (tmp_path / "owner.pgm").write_bytes(save_pgm(owner_face))
    (tmp_path / "stranger.pgm").write_bytes(save_pgm(stranger_face))
    (tmp_path / "flat.pgm").write_bytes(save_pgm(GrayImage(6, 5, b"\x11" * 30)))
    (tmp_path / "db.txt").write_bytes(save_facedb(facedb))
    (tmp_path / "cfg.txt").write_bytes(save_config(config))
    (tmp_path / "scn.txt").write_text("0 CAMERA owner.pgm\n10 SMS %s LOCATE\n" % OWNER)
    return tmp_path


def test_cli_identify(files, capsys):
    assert cli_main(["identify", "--db", str(files / "db.txt"), "--image", str(files / "owner.pgm")]) == 0
    assert capsys.readouterr().out == "MATCH owner 0.000000\n"
    assert cli_main(["identify", "--db", str(files / "db.txt"), "--image", str(files / "stranger.pgm")]) == 0
    assert capsys.readouterr().out.startswith("NOMATCH ")


def test_cli_identify_empty_db(files, capsys):
    (files / "empty.txt").write_bytes(b"FACEDB v1\n")
    cli_main(["identify", "--db", str(files / "empty.txt"), "--image", str(files / "owner.pgm")])
    assert capsys.readouterr().out == "NOMATCH -\n"


def test_cli_enroll(files, capsys):
    db = files / "new.txt"
    args = ["enroll", "--db", str(db), "--label", "rider", "--image", str(files / "stranger.pgm")]
    assert cli_main(args) == 0
    assert cli_main(args) == 2
    assert "already enrolled" in capsys.readouterr().err
    assert cli_main(["identify", "--db", str(db), "--image", str(files / "stranger.pgm")]) == 0
    assert capsys.readouterr().out == "MATCH rider 0.000000\n"


def test_cli_run(files, capsys):
    args = ["run", "--config", str(files / "cfg.txt"), "--db", str(files / "db.txt"),
            "--scenario", str(files / "scn.txt")]
    assert cli_main(args) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "0 READY controller initialized"
    assert "0 IGNITE engine started" in out
    assert cli_main(args + ["--trace-out", str(files / "trace.txt")]) == 0
    assert (files / "trace.txt").read_text() == out


def test_cli_lbp(files):
    assert cli_main(["lbp", "--image", str(files / "flat.pgm"), "--out", str(files / "lbp.pgm")]) == 0
    out = load_pgm((files / "lbp.pgm").read_bytes())
    assert (out.width, out.height) == (6, 5) and set(out.data) == {255}


@pytest.mark.parametrize("argv", [[], ["fly"], ["identify", "--db", "x"], ["identify", "--db", "x",
                                                                          "--image", "y", "--threshold", "-1"]])
def test_cli_usage_errors(argv, capsys):
    assert cli_main(argv) == 1
    assert capsys.readouterr().err.startswith("usage error:")


def test_cli_data_errors(files, capsys):
    (files / "bad.pgm").write_bytes(b"P2\n2 2\n65535\n")
    assert cli_main(["lbp", "--image", str(files / "bad.pgm"), "--out", str(files / "o.pgm")]) == 2
    assert cli_main(["identify", "--db", str(files / "missing.txt"), "--image", str(files / "owner.pgm")]) == 2
    (files / "bad_cfg.txt").write_text("owner_number=+1\n")
    assert cli_main(["run", "--config", str(files / "bad_cfg.txt"), "--db", str(files / "db.txt"),
                     "--scenario", str(files / "scn.txt")]) == 2
    err = capsys.readouterr().err
    assert len(err.strip().splitlines()) == 3
