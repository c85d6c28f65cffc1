import math

import pytest

import ofee


def test_codec_roundtrip():
    frames = [ofee.EventFrame(ofee.Trigger("went", "Movement_Transport")),
              ofee.EventFrame(ofee.Trigger("killed", "Life_Die"))]
    text = ofee.encode_trigger_target(frames)
    assert text == "went [Movement_Transport] [and] killed [Life_Die]"
    triggers, warnings = ofee.decode_trigger_candidate(text)
    assert [t.word for t in triggers] == ["went", "killed"]
    assert warnings == []

    frame = ofee.EventFrame(ofee.Trigger("killed", "Life_Die"),
                            [ofee.ArgumentPair("Agent", "father - in - law"),
                             ofee.ArgumentPair("Place", "home")])
    target = ofee.encode_argument_target(frame, {"Life_Die": ["Agent", "Place"]})
    assert target == "<Agent> father - in - law </Agent> <Place> home </Place>"
    args, _ = ofee.decode_argument_output(target)
    assert args == frame.arguments


def test_prompts_and_errors():
    assert ofee.build_trigger_prompt(" He went home . ") == "TriggerEvent: He went home ."
    with pytest.raises(ofee.OfeeError, match="empty context"):
        ofee.build_trigger_prompt("")


def test_selector_math():
    assert ofee.hinge_loss([0.8], [0.3, 0.9], 0.5) == pytest.approx(0.6, abs=1e-15)
    fused = ofee.fuse_scores([2.0, 0.0], [0.0, 0.0], 0.4)
    assert fused == pytest.approx([0.6523, 0.3477], abs=5e-4)
    assert math.isclose(sum(ofee.softmax([1.0, 2.0, 3.0])), 1.0)
    assert ofee.select([2.0, 0.0], [0.0, 0.0], 0.4, 0.2) == [0, 1]
    assert ofee.select([2.0, 0.0], [0.0, 0.0], 0.4, 0.35) == [0]


def test_metrics():
    assert ofee.f1_from_counts(3, 4, 6) == (0.75, 0.5, pytest.approx(0.6))
    gold = [ofee.ContextInstance("d1", "He went home .",
                                 [ofee.EventFrame(ofee.Trigger("went", "Movement_Transport"))])]
    report = ofee.evaluate_corpus([("d1", gold[0].gold_frames)], gold)
    assert report["Trig-C"]["f1"] == 1.0


def test_toy_backend():
    backend = ofee.ToyBackend()
    prompt = ofee.build_trigger_prompt("He went home .")
    backend.add(prompt, "went [Movement_Transport]", -0.1)
    backend.add(prompt, "noise", -0.3)
    assert backend.generate_topk(prompt, 1) == [("went [Movement_Transport]", -0.1)]
    inst = ofee.ContextInstance("d1", "He went home .")
    cands = backend.trigger_candidates(inst)
    assert len(cands["candidates"]) == 1


def test_oracle_pipeline(tmp_path):
    ofee.write_synthetic_bundle(str(tmp_path / "bundle"), 10, 10, 10, 3)
    report = ofee.run_pipeline(str(tmp_path / "bundle" / "oracle.json"), str(tmp_path / "run"))
    assert all(report[k]["f1"] == 1.0 for k in ("Trig-I", "Trig-C", "Arg-I", "Arg-C"))
    instances, load_report = ofee.load_corpus(str(tmp_path / "bundle" / "test.jsonl"))
    assert len(instances) == 10
    assert load_report["errors"] == []
