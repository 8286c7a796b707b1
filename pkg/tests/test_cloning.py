import math

import numpy as np
import pytest

from scholarnet.cloning import (
    ClusterParams,
    ResearcherNode,
    cluster_publications,
    high_impact_threshold,
    knee_eps,
    load_clone_labels,
    load_clone_report,
    load_embeddings,
    make_clones,
    save_clone_labels,
    save_clone_report,
    save_embeddings,
)
from scholarnet.errors import DegenerateProfileError, DimensionError, SchemaError
from scholarnet.ingest import Publication, build_corpus
from scholarnet.profiles import DocTopicTable, aggregate_profile


class TestHighImpactThreshold:
    def test_median_22_gives_33(self):
        assert high_impact_threshold([10, 22, 40]) == 33.0

    def test_constant_counts(self):
        assert high_impact_threshold([5, 5, 5]) == 7.5

    def test_even_length_median(self):
        # median (10+20)/2 = 15, times 1.5
        assert high_impact_threshold([4, 10, 20, 40]) == 22.5

    def test_empty_rejected(self):
        with pytest.raises(DimensionError):
            high_impact_threshold([])


def topic_vector(t, topics=4, mass=0.94):
    v = np.full(topics, (1.0 - mass) / (topics - 1))
    v[t] = mass
    return v


class TestClusterPublications:
    def test_two_tight_groups(self):
        rng = np.random.default_rng(11)
        vectors = {}
        for i in range(10):
            jitter = rng.uniform(-1e-4, 1e-4, 4)
            a = topic_vector(0) + jitter
            vectors[f"a{i}"] = a / a.sum()
            b = topic_vector(3) + jitter
            vectors[f"b{i}"] = b / b.sum()
        labels = cluster_publications(vectors, ClusterParams(min_samples=5, min_cluster_size=10))
        groups = {
            frozenset(k for k, v in labels.items() if v == label)
            for label in set(labels.values())
        }
        assert set(labels.values()) == {0, 1}
        assert frozenset(f"a{i}" for i in range(10)) in groups
        assert frozenset(f"b{i}" for i in range(10)) in groups

    def test_all_identical_single_cluster(self):
        vectors = {f"p{i}": topic_vector(1) for i in range(12)}
        labels = cluster_publications(vectors, ClusterParams(min_samples=5, min_cluster_size=10))
        assert set(labels.values()) == {0}

    def test_external_labels_verbatim(self):
        vectors = {"a": topic_vector(0), "b": topic_vector(1), "c": topic_vector(2)}
        external = {"a": 5, "b": -1, "c": 5}
        labels = cluster_publications(vectors, labels=external)
        assert labels == {"a": 5, "b": -1, "c": 5}

    def test_external_labels_must_cover(self):
        vectors = {"a": topic_vector(0), "b": topic_vector(1)}
        with pytest.raises(SchemaError, match="b"):
            cluster_publications(vectors, labels={"a": 0})

    def test_needs_two_documents(self):
        with pytest.raises(DimensionError):
            cluster_publications({"only": topic_vector(0)})

    def test_undersized_clusters_become_noise(self):
        vectors = {f"a{i}": topic_vector(0) for i in range(12)}
        vectors.update({f"b{i}": topic_vector(3) for i in range(3)})
        labels = cluster_publications(vectors, ClusterParams(min_samples=3, min_cluster_size=5))
        assert all(labels[f"a{i}"] == 0 for i in range(12))
        assert all(labels[f"b{i}"] == -1 for i in range(3))

    def test_loose_group_behind_tight_one_is_recovered(self):
        # the tight group's radius misses the loose one entirely; the
        # second pass over the leftovers has to find it
        rng = np.random.default_rng(7)
        vectors = {f"a{i}": topic_vector(0) for i in range(12)}
        for i in range(12):
            v = topic_vector(3) + rng.uniform(-1e-2, 1e-2, 4)
            vectors[f"b{i}"] = v / v.sum()
        labels = cluster_publications(vectors, ClusterParams(min_samples=5, min_cluster_size=10))
        assert {labels[f"a{i}"] for i in range(12)} == {0}
        assert {labels[f"b{i}"] for i in range(12)} == {1}


class TestKneeEps:
    def test_picks_the_gap(self):
        # 8 points in two tight pairs of clusters; k-distances split in two plateaus
        d_small, d_big = 0.01, 0.9
        n = 8
        dist = np.full((n, n), d_big)
        for block in (range(0, 4), range(4, 8)):
            for i in block:
                for j in block:
                    dist[i, j] = 0.0 if i == j else d_small
        eps = knee_eps(dist, min_samples=3)
        assert d_small <= eps < d_big

    def test_single_regime_uses_curve_maximum(self):
        # linear k-distance ramp has no elbow; radius covers the whole curve
        n_pairs = 12
        gaps = [1.0 + 0.001 * i for i in range(n_pairs)]
        n = 2 * n_pairs
        dist = np.full((n, n), 100.0)
        np.fill_diagonal(dist, 0.0)
        for i, gap in enumerate(gaps):
            dist[2 * i, 2 * i + 1] = dist[2 * i + 1, 2 * i] = gap
        assert knee_eps(dist, min_samples=2) == pytest.approx(max(gaps))


def corpus_with(researcher_docs):
    """researcher_docs: map rid -> list of topic vectors."""
    pubs = []
    rows = {}
    i = 0
    for rid, vectors in researcher_docs.items():
        for v in vectors:
            pid = f"{rid}_p{i:03d}"
            i += 1
            pubs.append(
                Publication(pub_id=pid, title="t", abstract="", year=2020, author_ids=frozenset({rid}))
            )
            rows[pid] = np.asarray(v, dtype=np.float64)
    topics = len(next(iter(rows.values())))
    return build_corpus(pubs), DocTopicTable(topic_count=topics, rows=rows)


def dual_topic_docs(rng, n_per_side=12, topics=4):
    docs = []
    for t in (0, 3):
        for _ in range(n_per_side):
            v = topic_vector(t, topics) + rng.uniform(-1e-4, 1e-4, topics)
            docs.append(v / v.sum())
    return docs


class TestMakeClones:
    def params(self):
        return ClusterParams(min_samples=5, min_cluster_size=10)

    def setup_corpus(self, seed=0):
        rng = np.random.default_rng(seed)
        spec = {f"r{i}": [topic_vector(i % 2, 4) for _ in range(4)] for i in range(6)}
        spec["big"] = dual_topic_docs(rng)
        return corpus_with(spec)

    def test_below_threshold_passthrough(self):
        corpus, table = self.setup_corpus()
        nodes, report = make_clones(corpus, table, params=self.params())
        small = [n for n in nodes if n.base_id == "r0"]
        assert len(small) == 1
        assert small[0].node_id == "r0"
        assert small[0].clone_index == 0

    def test_dual_topic_researcher_split(self):
        corpus, table = self.setup_corpus()
        nodes, report = make_clones(corpus, table, params=self.params())
        clones = [n for n in nodes if n.base_id == "big"]
        assert len(clones) >= 2
        assert all(n.is_clone for n in clones)
        assert report.cloned_count == 1
        assert report.high_impact_count == 1
        assert report.clones_per_researcher == {"big": len(clones)}

    def test_clone_partition_invariants(self):
        corpus, table = self.setup_corpus()
        nodes, _ = make_clones(corpus, table, params=self.params())
        clones = [n for n in nodes if n.base_id == "big"]
        union = set()
        for n in clones:
            assert not (union & n.pub_ids)
            union |= n.pub_ids
        assert union == set(corpus.researchers["big"])

    def test_profiles_match_aggregation(self):
        corpus, table = self.setup_corpus()
        nodes, _ = make_clones(corpus, table, params=self.params())
        for n in nodes:
            expected = aggregate_profile(table, n.pub_ids)
            assert n.profile == pytest.approx(expected, abs=1e-15)

    def test_infinite_threshold_is_identity(self):
        corpus, table = self.setup_corpus()
        nodes, report = make_clones(corpus, table, threshold_factor=math.inf, params=self.params())
        assert all(n.clone_index == 0 for n in nodes)
        assert [n.node_id for n in nodes] == sorted(corpus.researchers)
        assert report.cloned_count == 0
        assert report.high_impact_count == 0

    def test_noise_clone_gets_highest_index(self):
        rng = np.random.default_rng(0)
        docs = dual_topic_docs(rng)
        outlier = np.array([0.25, 0.26, 0.25, 0.24])
        docs.append(outlier / outlier.sum())
        spec = {f"r{i}": [topic_vector(i % 2, 4) for _ in range(4)] for i in range(6)}
        spec["big"] = docs
        corpus, table = corpus_with(spec)
        nodes, _ = make_clones(corpus, table, params=self.params())
        clones = [n for n in nodes if n.base_id == "big"]
        assert len(clones) == 3
        noise_clone = max(clones, key=lambda n: n.clone_index)
        outlier_pid = [p for p in corpus.researchers["big"]][-1]
        assert outlier_pid in noise_clone.pub_ids
        assert len(noise_clone.pub_ids) == 1

    def test_external_labels_respected(self):
        corpus, table = self.setup_corpus()
        big_pubs = corpus.researchers["big"]
        half = len(big_pubs) // 2
        external = {"big": {p: (0 if i < half else 7) for i, p in enumerate(big_pubs)}}
        nodes, _ = make_clones(corpus, table, params=self.params(), labels=external)
        clones = [n for n in nodes if n.base_id == "big"]
        assert len(clones) == 2
        assert {len(n.pub_ids) for n in clones} == {half, len(big_pubs) - half}

    def test_zero_row_doc_goes_to_noise(self):
        rng = np.random.default_rng(0)
        docs = dual_topic_docs(rng)
        outlier = np.array([0.25, 0.26, 0.25, 0.24])
        docs.append(outlier / outlier.sum())
        docs.append(np.zeros(4))
        spec = {f"r{i}": [topic_vector(i % 2, 4) for _ in range(4)] for i in range(6)}
        spec["big"] = docs
        corpus, table = corpus_with(spec)
        nodes, _ = make_clones(corpus, table, params=self.params())
        clones = [n for n in nodes if n.base_id == "big"]
        zero_pid = sorted(corpus.researchers["big"])[-1]
        noise_clone = max(clones, key=lambda n: n.clone_index)
        assert len(clones) == 3
        assert zero_pid in noise_clone.pub_ids
        assert len(noise_clone.pub_ids) == 2

    def test_all_zero_noise_clone_has_no_profile(self):
        rng = np.random.default_rng(0)
        docs = dual_topic_docs(rng)
        docs.append(np.zeros(4))
        spec = {f"r{i}": [topic_vector(i % 2, 4) for _ in range(4)] for i in range(6)}
        spec["big"] = docs
        corpus, table = corpus_with(spec)
        with pytest.raises(DegenerateProfileError):
            make_clones(corpus, table, params=self.params())

    def test_embeddings_route_uses_euclidean(self):
        spec = {f"r{i}": [topic_vector(i % 2, 4) for _ in range(4)] for i in range(6)}
        spec["big"] = [topic_vector(0)] * 24  # topic rows identical: no split without embeddings
        corpus, table = corpus_with(spec)
        vectors = {}
        for i, pid in enumerate(corpus.researchers["big"]):
            vectors[pid] = np.zeros(3) if i < 12 else np.full(3, 10.0)
        for rid in corpus.researchers:
            if rid == "big":
                continue
            for j, pid in enumerate(corpus.researchers[rid]):
                vectors[pid] = np.full(3, float(j))
        nodes, _ = make_clones(corpus, table, params=self.params(), doc_vectors=vectors)
        clones = [n for n in nodes if n.base_id == "big"]
        assert len(clones) == 2
        assert {len(n.pub_ids) for n in clones} == {12}
        nodes_no_emb, _ = make_clones(corpus, table, params=self.params())
        assert [n.node_id for n in nodes_no_emb if n.base_id == "big"] == ["big"]


class TestResearcherNode:
    def test_naming_consistency_enforced(self):
        with pytest.raises(SchemaError):
            ResearcherNode("x#2", "x", 1, frozenset({"p"}), np.array([1.0]))

    def test_base_id_may_not_contain_hash(self):
        with pytest.raises(SchemaError):
            ResearcherNode("a#b", "a#b", 0, frozenset({"p"}), np.array([1.0]))

    def test_unsplit_node_id_equals_base(self):
        node = ResearcherNode("x", "x", 0, frozenset({"p"}), np.array([1.0]))
        assert not node.is_clone


class TestCloneInterchange:
    def test_labels_round_trip(self, tmp_path):
        labels = {"r1": {"p1": 0, "p2": -1}, "r2": {"p3": 2}}
        path = tmp_path / "labels.json"
        save_clone_labels(labels, path)
        assert load_clone_labels(path) == labels

    def test_labels_reject_non_integer(self, tmp_path):
        path = tmp_path / "labels.json"
        path.write_text('{"labels": {"r1": {"p1": "zero"}}}')
        with pytest.raises(SchemaError):
            load_clone_labels(path)

    def test_embeddings_round_trip(self, tmp_path):
        vectors = {"p1": np.array([1.0, 2.0]), "p2": np.array([3.0, 4.0])}
        path = tmp_path / "emb.jsonl"
        save_embeddings(vectors, path)
        loaded = load_embeddings(path)
        assert set(loaded) == {"p1", "p2"}
        assert loaded["p1"] == pytest.approx([1.0, 2.0])

    def test_embeddings_dimension_mismatch(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        path.write_text('{"pub_id": "a", "vector": [1.0]}\n{"pub_id": "b", "vector": [1.0, 2.0]}\n')
        with pytest.raises(DimensionError):
            load_embeddings(path)

    def test_clone_report_round_trip(self, tmp_path):
        corpus, table = TestMakeClones().setup_corpus()
        _, report = make_clones(corpus, table, params=ClusterParams(5, 10))
        path = tmp_path / "report.json"
        save_clone_report(report, path)
        loaded = load_clone_report(path)
        assert loaded == report

    def test_infinite_threshold_round_trips_as_null(self, tmp_path):
        corpus, table = TestMakeClones().setup_corpus()
        _, report = make_clones(corpus, table, threshold_factor=math.inf, params=ClusterParams(5, 10))
        path = tmp_path / "report.json"
        save_clone_report(report, path)
        assert "Infinity" not in path.read_text()
        assert load_clone_report(path).threshold_used == math.inf
