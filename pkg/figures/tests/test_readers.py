import json

import numpy as np
import pytest

from ksfigures.readers import (
    FigureInputError,
    load_eigenfunction_fields,
    read_eigenvalue_csv,
    read_heatmap_csv,
    read_pivots_csv,
    read_vector_container,
)


def write_container(path, matrix, indices):
    matrix = np.asarray(matrix, dtype="<f8")
    indices = np.asarray(indices, dtype="<i8")
    with open(path, "wb") as fh:
        np.array(matrix.shape, dtype="<i8").tofile(fh)
        indices.tofile(fh)
        matrix.tofile(fh)


def test_eigenvalue_csv(tmp_path):
    path = tmp_path / "eig.csv"
    path.write_text("index,lambda\n0,1.0\n1,0.25\n")
    assert np.allclose(read_eigenvalue_csv(path), [1.0, 0.25])


def test_eigenvalue_csv_missing_column_named(tmp_path):
    path = tmp_path / "eig.csv"
    path.write_text("index,value\n0,1.0\n")
    with pytest.raises(FigureInputError, match="lambda"):
        read_eigenvalue_csv(path)


def test_heatmap_csv(tmp_path):
    path = tmp_path / "heat.csv"
    path.write_text("t,-1.0,0.0,1.0\n0.0,1,2,3\n0.5,4,5,6\n")
    times, grid, values = read_heatmap_csv(path)
    assert np.allclose(times, [0.0, 0.5])
    assert np.allclose(grid, [-1.0, 0.0, 1.0])
    assert values.shape == (2, 3)


def test_heatmap_csv_requires_t_header(tmp_path):
    path = tmp_path / "heat.csv"
    path.write_text("time,-1.0,0.0\n0.0,1,2\n")
    with pytest.raises(FigureInputError, match="'t'"):
        read_heatmap_csv(path)


def test_pivots_csv(tmp_path):
    path = tmp_path / "pivots.csv"
    path.write_text("pivot,time_index,space_index,t,s\n3,0,3,0.0,1.5\n")
    t, s = read_pivots_csv(path)
    assert np.allclose(t, [0.0])
    assert np.allclose(s, [1.5])


def test_pivots_csv_missing_column(tmp_path):
    path = tmp_path / "pivots.csv"
    path.write_text("pivot,time_index,space_index,t\n3,0,3,0.0\n")
    with pytest.raises(FigureInputError, match="'s'"):
        read_pivots_csv(path)


def test_vector_container_roundtrip(tmp_path):
    path = tmp_path / "vec.bin"
    mat = np.arange(12, dtype=float).reshape(6, 2)
    write_container(path, mat, [0, 1])
    back, idx = read_vector_container(path)
    assert np.array_equal(back, mat)
    assert np.array_equal(idx, [0, 1])


def test_vector_container_truncated(tmp_path):
    path = tmp_path / "vec.bin"
    write_container(path, np.ones((4, 2)), [0, 1])
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(FigureInputError, match="truncated"):
        read_vector_container(path)


def test_eigenfunction_fields_reshape(tmp_path):
    vectors = np.arange(24, dtype=float).reshape(12, 2)  # 3 times x 4 points
    write_container(tmp_path / "vec.bin", vectors, [0, 1])
    (tmp_path / "vec.json").write_text(json.dumps({"delays": 2}))
    (tmp_path / "data.json").write_text(json.dumps({"n_snapshots": 4, "grid_size": 4}))
    fields = load_eigenfunction_fields(tmp_path / "vec.bin", tmp_path / "data.json", [1])
    assert fields[0].shape == (3, 4)
    assert np.array_equal(fields[0].reshape(-1), vectors[:, 1])


def test_eigenfunction_fields_shape_mismatch(tmp_path):
    write_container(tmp_path / "vec.bin", np.ones((10, 1)), [0])
    (tmp_path / "vec.json").write_text(json.dumps({"delays": 2}))
    (tmp_path / "data.json").write_text(json.dumps({"n_snapshots": 4, "grid_size": 4}))
    with pytest.raises(FigureInputError, match="reshaped"):
        load_eigenfunction_fields(tmp_path / "vec.bin", tmp_path / "data.json", [0])
