import json

import numpy as np
import pytest

from ispukit import canonical_macs, load_model, save_model
from ispukit.costs import CATALOG, ModelArchitecture
from ispukit.errors import (
    DegenerateNeuronError,
    ModelFormatError,
    ModelValidationError,
    WidthError,
)

from conftest import random_binary_model, random_float_model


def build_model(rng, arch):
    if arch.kind == "float":
        return random_float_model(rng, arch.hidden)
    return random_binary_model(rng, arch.hidden)[0]


class TestRoundTrip:
    @pytest.mark.parametrize("arch", CATALOG, ids=lambda a: a.name)
    def test_catalog_round_trip(self, rng, arch):
        model = build_model(rng, arch)
        data = save_model(model)
        loaded = load_model(data)
        data2 = save_model(loaded)
        assert data == data2
        assert loaded.kind == model.kind
        assert loaded.hidden_widths == model.hidden_widths

    def test_binary_packed_words_identical(self, rng):
        model, _ = random_binary_model(rng, (32,))
        loaded = load_model(save_model(model))
        for a, b in zip(model.layers, loaded.layers):
            assert np.array_equal(a.weight_words, b.weight_words)

    def test_float_17_digit_weight_survives(self, rng):
        model = random_float_model(rng, ())
        w = model.layers[0].weights.copy()
        w[0, 0] = 0.12345678901234567
        model.layers[0].weights[:] = w
        loaded = load_model(save_model(model))
        assert loaded.layers[0].weights[0, 0] == 0.12345678901234567

    def test_save_to_path(self, rng, tmp_path):
        model = random_float_model(rng, (32,))
        path = tmp_path / "m.ispu-model"
        data = save_model(model, path)
        assert path.read_bytes() == data
        assert load_model(path).hidden_widths == (32,)

    def test_inference_identical_after_round_trip(self, rng):
        model, _ = random_binary_model(rng, (64,))
        loaded = load_model(save_model(model))
        for _ in range(20):
            x = rng.normal(0, 10, 30)
            p1, l1 = model.infer(x)
            p2, l2 = loaded.infer(x)
            assert l1 == l2 and np.array_equal(p1, p2)

    def test_metadata_round_trip(self, rng):
        model = random_float_model(rng, ())
        model.metadata.update({"class_names": ["a", "b", "c", "d", "e"]})
        loaded = load_model(save_model(model))
        assert loaded.metadata["class_names"] == ["a", "b", "c", "d", "e"]


class TestRejection:
    def test_truncated_file(self, rng):
        data = save_model(random_float_model(rng, (32,)))
        with pytest.raises(ModelFormatError):
            load_model(data[: len(data) // 2])

    def test_wrong_format_marker(self):
        with pytest.raises(ModelFormatError):
            load_model(b'{"format": "something-else", "version": "1"}')

    def test_unsupported_version(self, rng):
        doc = json.loads(save_model(random_float_model(rng, ())))
        doc["version"] = "2"
        with pytest.raises(ModelFormatError):
            load_model(json.dumps(doc))

    def test_binary_width_48_rejected(self, rng):
        doc = json.loads(save_model(random_binary_model(rng, (32,))[0]))
        doc["architecture"]["hidden"] = [48]
        with pytest.raises(WidthError):
            load_model(json.dumps(doc))

    def test_dimension_lie_names_layer(self, rng):
        doc = json.loads(save_model(random_float_model(rng, (32, 32))))
        doc["layers"][1]["bias"] = doc["layers"][1]["bias"][:-1]
        with pytest.raises(ModelValidationError) as err:
            load_model(json.dumps(doc))
        assert "layer 1" in str(err.value)

    def test_zero_gamma_binary_rejected(self, rng):
        doc = json.loads(save_model(random_binary_model(rng, ())[0]))
        doc["input_batchnorm"]["gamma"][3] = 0.0
        with pytest.raises(DegenerateNeuronError):
            load_model(json.dumps(doc))

    def test_nan_weight_rejected(self, rng):
        doc = json.loads(save_model(random_float_model(rng, ())))
        doc["layers"][0]["bias"][0] = float("nan")
        with pytest.raises(ModelFormatError):
            load_model(json.dumps(doc))   # dumps writes a bare NaN literal

    def test_malformed_hex_row(self, rng):
        doc = json.loads(save_model(random_binary_model(rng, ())[0]))
        doc["layers"][0]["rows"][0] = "XYZ"
        with pytest.raises(ModelValidationError):
            load_model(json.dumps(doc))

    def test_uppercase_hex_rejected(self, rng):
        doc = json.loads(save_model(random_binary_model(rng, ())[0]))
        doc["layers"][0]["rows"][0] = doc["layers"][0]["rows"][0].upper()
        if doc["layers"][0]["rows"][0].lower() == doc["layers"][0]["rows"][0]:
            doc["layers"][0]["rows"][0] = "ABCDEF12"
        with pytest.raises(ModelValidationError):
            load_model(json.dumps(doc))

    def test_missing_output_affine(self, rng):
        doc = json.loads(save_model(random_binary_model(rng, ())[0]))
        del doc["output_affine"]
        with pytest.raises(ModelFormatError):
            load_model(json.dumps(doc))

    def test_wrong_row_count_names_layer(self, rng):
        doc = json.loads(save_model(random_binary_model(rng, (32,))[0]))
        doc["layers"][0]["rows"].pop()
        with pytest.raises(ModelValidationError) as err:
            load_model(json.dumps(doc))
        assert "layer 0" in str(err.value)


class TestArchitectureAgreement:
    def test_loaded_float_2_64_has_canonical_macs_6336(self, rng):
        model = random_float_model(rng, (64, 64))
        loaded = load_model(save_model(model))
        arch = ModelArchitecture(loaded.kind, loaded.hidden_widths)
        assert canonical_macs(arch) == 6336

    def test_declared_input_must_match_kind(self, rng):
        doc = json.loads(save_model(random_float_model(rng, ())))
        doc["architecture"]["input"] = 32
        with pytest.raises(ModelValidationError):
            load_model(json.dumps(doc))
