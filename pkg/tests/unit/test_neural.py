import pytest
import torch

from kg_transfer.errors import CheckpointError, UsageError, VocabularyError
from kg_transfer.model import MemoryItem, TemporalAnnotations, Triple, Vocabulary, build_graph_view
from kg_transfer.neural import (
    ENCODER_REGISTRY, GraphBatch, TransferQNetwork, batch_graphs, check_gradients,
    compute_gradients, get_encoder, load_checkpoint, parameter_count, save_checkpoint,
    tensorize,
)

KINDS = sorted(ENCODER_REGISTRY)


def _items(vocab, specs):
    return [
        MemoryItem(Triple(vocab.entity(h), vocab.relation(r), vocab.entity(t)), TemporalAnnotations(ta, ta, 0))
        for h, r, t, ta in specs
    ]


SHORT = [
    ("agent", "at_location", "kitchen", 3),
    ("kitchen", "north", "wall", 3),
    ("kitchen", "east", "office", 3),
    ("john", "at_location", "kitchen", 3),
]
LONG = [("table", "at_location", "office", 1), ("office", "west", "kitchen", 0)]


def _net(vocab, kind="gcn", dtype="float64", **kw):
    params = dict(dim=4, layers=2, num_bases=3, hidden=5, seed=1)
    params.update(kw)
    return TransferQNetwork(len(vocab.entities), len(vocab.relations), kind=kind, dtype=dtype, **params)


def _batch(vocab, mode="full", dtype=torch.float64, short=SHORT, long=LONG):
    s, l = _items(vocab, short), _items(vocab, long)
    view = build_graph_view(s, l, mode, now=3, horizon=100)
    return tensorize(view, s, len(vocab.entities), len(vocab.relations), dtype)


# ------------------------------------------------------------------ #
# Tensorization
# ------------------------------------------------------------------ #

class TestTensorize:
    def test_shapes(self, toy_vocab):
        batch = _batch(toy_vocab)
        assert batch.edge_index.shape == (2, 6)
        assert batch.edge_features.shape == (6, 3)
        assert batch.item_index.shape == (4, 2)
        assert batch.items_per_graph == [4]

    def test_item_endpoint_missing(self, toy_vocab):
        s = _items(toy_vocab, SHORT)
        view = build_graph_view(s[:1], [], "stm_only", now=3, horizon=100)
        with pytest.raises(UsageError, match="endpoint"):
            tensorize(view, s, len(toy_vocab.entities), len(toy_vocab.relations))

    def test_entity_outside_vocabulary(self, toy_vocab):
        item = MemoryItem(Triple(0, 0, 99), TemporalAnnotations(0, 0))
        view = build_graph_view([item], [], "stm_only", now=0, horizon=100)
        with pytest.raises(VocabularyError, match="99"):
            tensorize(view, [item], len(toy_vocab.entities), len(toy_vocab.relations))


# ------------------------------------------------------------------ #
# Encoders and Q heads
# ------------------------------------------------------------------ #

class TestEncoders:
    def test_registry(self):
        assert KINDS == ["gcn", "rgcn", "stare_lite"]
        with pytest.raises(ValueError, match="Valid options"):
            get_encoder("gat", 4, 1, 5)

    @pytest.mark.parametrize("kind", KINDS)
    def test_zero_layers_is_identity(self, toy_vocab, kind):
        net = _net(toy_vocab, kind, layers=0)
        batch = _batch(toy_vocab)
        h, r = net.encode(batch)
        assert torch.equal(h, net.entity_embeddings(batch.node_entities))
        assert torch.equal(r, net.relation_embeddings.weight)

    def test_isolated_node_uses_self_path(self, toy_vocab):
        net = _net(toy_vocab, "gcn", layers=1)
        batch = GraphBatch(
            node_entities=torch.tensor([3]),
            edge_index=torch.zeros((2, 0), dtype=torch.long),
            edge_type=torch.zeros(0, dtype=torch.long),
            edge_features=torch.zeros((0, 3), dtype=torch.float64),
            item_index=torch.zeros((0, 2), dtype=torch.long),
            item_graph=torch.zeros(0, dtype=torch.long),
            items_per_graph=[0],
        )
        h, _ = net.encode(batch)
        x = net.entity_embeddings.weight[3]
        expected = torch.relu(net.encoder.node_layers[0](x))
        assert torch.allclose(h[0], expected)

    @pytest.mark.parametrize("kind", KINDS)
    def test_edge_order_invariance(self, toy_vocab, kind):
        net = _net(toy_vocab, kind)
        batch = _batch(toy_vocab)
        perm = torch.tensor([5, 2, 0, 4, 1, 3])
        shuffled = GraphBatch(
            node_entities=batch.node_entities,
            edge_index=batch.edge_index[:, perm],
            edge_type=batch.edge_type[perm],
            edge_features=batch.edge_features[perm],
            item_index=batch.item_index,
            item_graph=batch.item_graph,
            items_per_graph=batch.items_per_graph,
        )
        assert torch.allclose(net.q_values_local(batch), net.q_values_local(shuffled), atol=1e-9)

    @pytest.mark.parametrize("kind", KINDS)
    def test_node_relabeling_is_equivariant(self, toy_vocab, kind):
        net = _net(toy_vocab, kind)
        batch = _batch(toy_vocab)
        perm = torch.randperm(batch.num_nodes, generator=torch.Generator().manual_seed(4))
        inverse = torch.empty_like(perm)
        inverse[perm] = torch.arange(len(perm))
        relabeled = GraphBatch(
            node_entities=batch.node_entities[perm],
            edge_index=inverse[batch.edge_index],
            edge_type=batch.edge_type,
            edge_features=batch.edge_features,
            item_index=inverse[batch.item_index],
            item_graph=batch.item_graph,
            items_per_graph=batch.items_per_graph,
        )
        h, _ = net.encode(batch)
        h_relabeled, _ = net.encode(relabeled)
        assert torch.allclose(h_relabeled, h[perm], atol=1e-12)
        assert torch.allclose(net.q_values_local(relabeled), net.q_values_local(batch), atol=1e-12)

    @pytest.mark.parametrize("kind", KINDS)
    def test_batched_equals_separate(self, toy_vocab, kind):
        net = _net(toy_vocab, kind)
        a_short, a_long = _items(toy_vocab, SHORT), _items(toy_vocab, LONG)
        b_short = _items(toy_vocab, [("agent", "at_location", "office", 3), ("office", "south", "wall", 3)])
        views = [
            (build_graph_view(a_short, a_long, "full", 3, 100), a_short),
            (build_graph_view(b_short, [], "full", 3, 100), b_short),
        ]
        joint = net.q_values_local(batch_graphs(views, len(toy_vocab.entities), len(toy_vocab.relations), torch.float64))
        apart = torch.cat([
            net.q_values_local(batch_graphs([v], len(toy_vocab.entities), len(toy_vocab.relations), torch.float64))
            for v in views
        ])
        assert torch.allclose(joint, apart, atol=1e-12)


class TestQHeads:
    def test_local_shape(self, toy_vocab):
        assert _net(toy_vocab).q_values_local(_batch(toy_vocab)).shape == (4, 2)

    def test_no_items(self, toy_vocab):
        s = _items(toy_vocab, SHORT)
        view = build_graph_view(s, [], "stm_only", 3, 100)
        batch = tensorize(view, [], len(toy_vocab.entities), len(toy_vocab.relations), torch.float64)
        assert _net(toy_vocab).q_values_local(batch).shape == (0, 2)
        with pytest.raises(UsageError, match="at least one"):
            _net(toy_vocab).q_values_global(batch)

    def test_duplicate_items_identical_rows(self, toy_vocab):
        s = _items(toy_vocab, SHORT)
        view = build_graph_view(s, [], "stm_only", 3, 100)
        batch = tensorize(view, [s[2], s[2]], len(toy_vocab.entities), len(toy_vocab.relations), torch.float64)
        q = _net(toy_vocab).q_values_local(batch)
        assert torch.equal(q[0], q[1])

    def test_global_of_one_item_equals_local(self, toy_vocab):
        s = _items(toy_vocab, SHORT[:1])
        view = build_graph_view(s, [], "stm_only", 3, 100)
        batch = tensorize(view, s, len(toy_vocab.entities), len(toy_vocab.relations), torch.float64)
        net = _net(toy_vocab)
        assert torch.allclose(net.q_values_global(batch)[0], net.q_values_local(batch)[0])

    def test_global_rows_broadcast(self, toy_vocab):
        q = _net(toy_vocab).q_values(_batch(toy_vocab), "global")
        assert q.shape == (4, 2)
        assert all(torch.equal(q[0], row) for row in q)

    def test_deterministic(self, toy_vocab):
        assert torch.equal(
            _net(toy_vocab, "rgcn").q_values_local(_batch(toy_vocab)),
            _net(toy_vocab, "rgcn").q_values_local(_batch(toy_vocab)),
        )

    def test_seed_changes_parameters(self, toy_vocab):
        a = _net(toy_vocab, seed=1).entity_embeddings.weight
        b = _net(toy_vocab, seed=2).entity_embeddings.weight
        assert not torch.equal(a, b)

    def test_init_bound(self, toy_vocab):
        net = _net(toy_vocab, dim=16)
        assert all(p.abs().max() <= 0.25 for p in net.parameters())

    def test_parameter_count_gcn(self, toy_vocab):
        net = TransferQNetwork(len(toy_vocab.entities), len(toy_vocab.relations))
        tables = (len(toy_vocab.entities) + len(toy_vocab.relations)) * 16
        assert parameter_count(net) == tables + 2 * (2 * 272) + (32 * 16 + 16) + (16 * 2 + 2)


# ------------------------------------------------------------------ #
# Gradients
# ------------------------------------------------------------------ #

class TestGradients:
    def test_zero_loss_zero_gradients(self, toy_vocab):
        net = _net(toy_vocab)
        q = net.q_values_local(_batch(toy_vocab))
        grads = compute_gradients(((q - q.detach()) ** 2).mean(), net)
        assert all(torch.count_nonzero(g) == 0 for g in grads.values())

    def test_unused_parameters_get_zeros(self, toy_vocab):
        net = _net(toy_vocab, layers=0)
        loss = net.q_values_local(_batch(toy_vocab)).sum()
        grads = compute_gradients(loss, net)
        assert set(grads) == {n for n, _ in net.named_parameters()}
        assert torch.count_nonzero(grads["relation_embeddings.weight"]) == 0

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("head", ["local", "global"])
    def test_finite_differences(self, kind, head):
        vocab = Vocabulary.for_world(["kitchen", "office"], ["john"])
        short = [("agent", "at_location", "kitchen", 3), ("kitchen", "east", "office", 3),
                 ("john", "at_location", "kitchen", 3)]
        net = _net(vocab, kind, dim=3, num_bases=2, hidden=3)
        batch = _batch(vocab, short=short, long=[("office", "west", "kitchen", 1)])
        assert batch.num_nodes <= 6
        assert check_gradients(net, batch, head=head)

    def test_gradient_check_needs_float64(self, toy_vocab):
        with pytest.raises(ValueError, match="float64"):
            check_gradients(_net(toy_vocab, dtype="float32"), _batch(toy_vocab, dtype=torch.float32))


# ------------------------------------------------------------------ #
# Checkpoints
# ------------------------------------------------------------------ #

class TestCheckpoint:
    def test_save_and_load(self, tmp_path, toy_vocab):
        net = _net(toy_vocab, "stare_lite")
        save_checkpoint(tmp_path / "c.pt", net, toy_vocab, meta={"seed": 1})
        again, meta = load_checkpoint(tmp_path / "c.pt", vocab=toy_vocab)
        assert meta == {"seed": 1}
        assert again.hparams == net.hparams
        batch = _batch(toy_vocab)
        assert torch.equal(again.q_values_local(batch), net.q_values_local(batch))

    def test_vocabulary_mismatch(self, tmp_path, toy_vocab):
        save_checkpoint(tmp_path / "c.pt", _net(toy_vocab), toy_vocab)
        other = Vocabulary.for_world(["garden"], ["sofa"])
        with pytest.raises(CheckpointError, match="different vocabulary"):
            load_checkpoint(tmp_path / "c.pt", vocab=other)

    def test_shape_mismatch(self, tmp_path, toy_vocab):
        net = _net(toy_vocab)
        save_checkpoint(tmp_path / "c.pt", net, toy_vocab)
        payload = torch.load(tmp_path / "c.pt", weights_only=True)
        payload["hparams"]["hidden"] = 7
        torch.save(payload, tmp_path / "c.pt")
        with pytest.raises(CheckpointError, match="shape"):
            load_checkpoint(tmp_path / "c.pt")

    def test_unreadable(self, tmp_path):
        (tmp_path / "c.pt").write_bytes(b"not a checkpoint")
        with pytest.raises(CheckpointError, match="Cannot read"):
            load_checkpoint(tmp_path / "c.pt")
