"""Contract state machine: windows, escrow arithmetic, audit verification."""

import pytest

from sevdel import cloud, codec, owner
from sevdel.contract import (
    Contract,
    Ledger,
    LogicalClock,
    verify_audit_response,
)
from sevdel.enclave import EnclaveRegistry
from sevdel.errors import (
    DeadlinePassed,
    DuplicateOwner,
    DuplicateTags,
    InsufficientBalance,
    UnknownOwner,
    WrongState,
    WrongWindow,
)
from sevdel.groups import vgen_points
from sevdel.rng import SeededRng

T1, T2, T3, T4 = 10, 20, 30, 40
N = "file-1"


def _contract(params, balances=None):
    clock = LogicalClock()
    ledger = Ledger(balances or {"prov": 5000, "own": 500, "own2": 700})
    return Contract(params, ledger, clock), ledger, clock


def _provider_pub(params, seed=b"prov"):
    return cloud.server_keygen(params, SeededRng(seed)).A.to_bytes()


class _Deployment:
    """Full protocol fixture: outsourced, encrypted, tags registered."""

    def __init__(self, params, seed=b"dep", size=120, s=2):
        rng = SeededRng(seed)
        self.params = params
        self.data = rng.child("file").read(size)
        self.manifest, self.blocks = codec.split(self.data, s, params.sector_bits)
        self.okeys = owner.keygen(params, rng.child("ok"))
        self.skeys = cloud.server_keygen(params, rng.child("sk"))
        self.gens, self.tags = owner.outsource(
            params, self.okeys, self.manifest, self.blocks, rng.child("out"))
        registry = EnclaveRegistry()
        self.enclave = registry.create(self.manifest.file_id)
        self.cts, self.v_pub = cloud.encrypt_file(
            params, self.enclave, self.manifest, self.blocks, rng.child("enc"))
        self.enc_tags = cloud.gen_enc_tags(
            params, self.skeys, self.manifest, self.cts, self.gens.u,
            vgen_points(params, self.manifest.file_id, self.manifest.s))

    def register(self, contract):
        contract.register_tags(
            N, self.manifest.file_id,
            [e.to_bytes() for e in self.enc_tags.sigma],
            [e.to_bytes() for e in self.gens.u])

    def audit_challenge(self, seed=77, count=3):
        return owner.gen_challenge(self.manifest, min(count, self.manifest.n), seed)


def _deploy_to_claimed(params, dep):
    contract, ledger, clock = _contract(params)
    contract.service("prov", N, dep.skeys.A.to_bytes(), 1000, T1, T2, T3, T4)
    dep.register(contract)
    clock.advance_to(T1)
    contract.agree("own", N, 50)
    clock.advance_to(T2)
    contract.claim(N)
    return contract, ledger, clock


# -- service ------------------------------------------------------------------

def test_service_escrows_full_balance_boundary(toy_params):
    contract, ledger, clock = _contract(toy_params, {"prov": 1000})
    contract.service("prov", N, _provider_pub(toy_params), 1000, T1, T2, T3, T4)
    assert ledger.balance("prov") == 0
    assert contract.records[N].escrow == 1000
    assert contract.total_funds() == 1000


def test_service_insufficient_balance(toy_params):
    contract, ledger, _ = _contract(toy_params, {"prov": 999})
    with pytest.raises(InsufficientBalance):
        contract.service("prov", N, _provider_pub(toy_params), 1000, T1, T2, T3, T4)
    assert N not in contract.records
    assert ledger.balance("prov") == 999


def test_service_after_deadline(toy_params):
    contract, _, clock = _contract(toy_params)
    clock.advance_to(T1 + 1)
    with pytest.raises(DeadlinePassed):
        contract.service("prov", N, _provider_pub(toy_params), 100, T1, T2, T3, T4)


def test_service_requires_increasing_deadlines(toy_params):
    contract, _, _ = _contract(toy_params)
    with pytest.raises(WrongWindow):
        contract.service("prov", N, _provider_pub(toy_params), 100, T1, T1, T3, T4)


def test_service_duplicate_record(toy_params):
    contract, _, _ = _contract(toy_params)
    contract.service("prov", N, _provider_pub(toy_params), 100, T1, T2, T3, T4)
    with pytest.raises(WrongState):
        contract.service("prov", N, _provider_pub(toy_params), 100, T1, T2, T3, T4)


def test_conservation_across_ops(toy_params):
    contract, ledger, clock = _contract(toy_params)
    total0 = contract.total_funds()
    contract.service("prov", N, _provider_pub(toy_params), 1000, T1, T2, T3, T4)
    assert contract.total_funds() == total0
    clock.advance_to(T1)
    contract.agree("own", N, 50)
    assert contract.total_funds() == total0


# -- agree -----------------------------------------------------------------------

def test_agree_zero_stake_rejected(toy_params):
    contract, _, clock = _contract(toy_params)
    contract.service("prov", N, _provider_pub(toy_params), 100, T1, T2, T3, T4)
    clock.advance_to(T1)
    with pytest.raises(InsufficientBalance):
        contract.agree("own", N, 0)


def test_agree_registers_owner(toy_params):
    contract, ledger, clock = _contract(toy_params)
    contract.service("prov", N, _provider_pub(toy_params), 100, T1, T2, T3, T4)
    clock.advance_to(T1)
    contract.agree("own", N, 50)
    rec = contract.records[N]
    assert rec.accept_count == 1
    assert rec.owners == {"own": 50}
    assert ledger.balance("own") == 450
    with pytest.raises(DuplicateOwner):
        contract.agree("own", N, 50)


def test_agree_outside_window(toy_params):
    contract, _, clock = _contract(toy_params)
    contract.service("prov", N, _provider_pub(toy_params), 100, T1, T2, T3, T4)
    with pytest.raises(WrongWindow):
        contract.agree("own", N, 50)  # before T1
    clock.advance_to(T2 + 1)
    with pytest.raises(WrongWindow):
        contract.agree("own", N, 50)


# -- claim / tags ------------------------------------------------------------------

def test_claim_only_exactly_at_t2(toy_params):
    dep = _Deployment(toy_params)
    contract, _, clock = _contract(toy_params)
    contract.service("prov", N, dep.skeys.A.to_bytes(), 100, T1, T2, T3, T4)
    dep.register(contract)
    clock.advance_to(T1)
    contract.agree("own", N, 50)
    clock.advance_to(T2 + 1)
    with pytest.raises(WrongWindow):
        contract.claim(N)


def test_claim_requires_tags_and_owner(toy_params):
    dep = _Deployment(toy_params)
    contract, _, clock = _contract(toy_params)
    contract.service("prov", N, dep.skeys.A.to_bytes(), 100, T1, T2, T3, T4)
    clock.advance_to(T1)
    contract.agree("own", N, 50)
    clock.advance_to(T2)
    with pytest.raises(WrongState):
        contract.claim(N)  # tags never registered


def test_registered_tags_roundtrip_bit_exact(toy_params):
    dep = _Deployment(toy_params)
    contract, _, _ = _contract(toy_params)
    contract.service("prov", N, dep.skeys.A.to_bytes(), 100, T1, T2, T3, T4)
    dep.register(contract)
    file_id, sigma_bytes, u_bytes = contract.registered_tags(N)
    assert file_id == dep.manifest.file_id
    assert list(sigma_bytes) == [e.to_bytes() for e in dep.enc_tags.sigma]
    assert list(u_bytes) == [e.to_bytes() for e in dep.gens.u]
    with pytest.raises(DuplicateTags):
        dep.register(contract)


def test_params_digest_recorded(toy_params):
    contract, _, _ = _contract(toy_params)
    assert contract.params_digest == toy_params.digest()


def test_two_inits_independent(toy_params):
    a, ledger_a, clock_a = _contract(toy_params)
    b, ledger_b, _ = _contract(toy_params)
    a.service("prov", N, _provider_pub(toy_params), 100, T1, T2, T3, T4)
    assert N in a.records and N not in b.records
    assert ledger_a.balance("prov") == 4900
    assert ledger_b.balance("prov") == 5000


def test_dump_log_writes_jsonl(toy_params, tmp_path):
    import json
    contract, _, clock = _contract(toy_params)
    contract.service("prov", N, _provider_pub(toy_params), 100, T1, T2, T3, T4)
    clock.advance_to(T1)
    contract.agree("own", N, 50)
    path = tmp_path / "log.jsonl"
    with open(path, "w") as fp:
        contract.dump_log(fp)
    lines = [json.loads(l) for l in path.read_text().splitlines()]
    assert [l["op"] for l in lines] == ["service", "agree"]
    assert lines[0]["ledger_delta"] == {"escrow:file-1": 100, "prov": -100}


# -- audit ------------------------------------------------------------------------

def test_audit_accepts_genuine_leak_and_returns_stake(toy_params):
    dep = _Deployment(toy_params)
    contract, ledger, clock = _deploy_to_claimed(toy_params, dep)
    clock.advance_to(25)
    ch = dep.audit_challenge()
    resp = owner.audit_respond(toy_params, dep.manifest, dep.cts, dep.enc_tags, ch)
    assert contract.audit_verify(N, "own", ch, resp)
    assert ledger.balance("own") == 500  # stake returned on acceptance
    assert contract.records[N].audited == ["own"]
    # a second audit by the same owner is refused, not double-paid
    with pytest.raises(WrongState):
        contract.audit_verify(N, "own", ch, resp)


def test_audit_rejects_forged_sigma(toy_params):
    dep = _Deployment(toy_params)
    contract, _, clock = _deploy_to_claimed(toy_params, dep)
    clock.advance_to(25)
    ch = dep.audit_challenge()
    resp = owner.audit_respond(toy_params, dep.manifest, dep.cts, dep.enc_tags, ch)
    resp.q2 = resp.q2 * toy_params.g1
    assert not contract.audit_verify(N, "own", ch, resp)


def test_audit_rejects_wrong_window_and_unknown_owner(toy_params):
    dep = _Deployment(toy_params)
    contract, _, clock = _deploy_to_claimed(toy_params, dep)
    ch = dep.audit_challenge()
    resp = owner.audit_respond(toy_params, dep.manifest, dep.cts, dep.enc_tags, ch)
    clock.advance_to(T3 + 1)
    with pytest.raises(WrongWindow):
        contract.audit_verify(N, "own", ch, resp)


def test_audit_unknown_owner(toy_params):
    dep = _Deployment(toy_params)
    contract, _, clock = _deploy_to_claimed(toy_params, dep)
    clock.advance_to(25)
    ch = dep.audit_challenge()
    resp = owner.audit_respond(toy_params, dep.manifest, dep.cts, dep.enc_tags, ch)
    with pytest.raises(UnknownOwner):
        contract.audit_verify(N, "stranger", ch, resp)


def test_audit_random_forgery_never_passes(toy_params):
    # an owner who holds only the plaintext guesses ciphertext components:
    # 1000 guesses, zero acceptances
    dep = _Deployment(toy_params, size=40, s=1)
    ch = owner.gen_challenge(dep.manifest, 2, rng_seed=5)
    rng = SeededRng(b"forge")
    group = toy_params.group
    from sevdel.groups import G1Elem
    accepted = 0
    for _ in range(1000):
        fake_rows_p = {}
        fake_rows_pp = {}
        for i, _g in ch.items:
            fake_rows_p[i] = tuple(
                G1Elem(group, group.g1_hash(rng.read(8))) for _ in range(dep.manifest.s))
            fake_rows_pp[i] = tuple(
                G1Elem(group, group.g1_hash(rng.read(8))) for _ in range(dep.manifest.s))
        q1p = [toy_params.g1_identity() for _ in range(dep.manifest.s)]
        q1pp = [toy_params.g1_identity() for _ in range(dep.manifest.s)]
        q2 = toy_params.g1_identity()
        for i, gamma in ch.items:
            for j in range(dep.manifest.s):
                q1p[j] = q1p[j] * (fake_rows_p[i][j] ** gamma)
                q1pp[j] = q1pp[j] * (fake_rows_pp[i][j] ** gamma)
            q2 = q2 * (dep.enc_tags.sigma[i - 1] ** gamma)  # sigma is public
        resp = owner.AuditResponse(
            q1_prime=tuple(q1p), q1_dprime=tuple(q1pp), q2=q2,
            revealed_prime=fake_rows_p, revealed_dprime=fake_rows_pp)
        if verify_audit_response(toy_params, dep.manifest.file_id, dep.gens.u,
                                 dep.skeys.A, dep.enc_tags.sigma, ch, resp):
            accepted += 1
    assert accepted == 0


# -- refund / penalty / timer -------------------------------------------------------

def test_refund_restores_every_balance(toy_params):
    dep = _Deployment(toy_params)
    contract, ledger, clock = _deploy_to_claimed(toy_params, dep)
    clock.advance_to(T3)
    contract.refund(N)
    assert ledger.balance("prov") == 5000
    assert ledger.balance("own") == 500
    assert contract.records[N].state == "FINISHED"
    assert contract.records[N].escrow == 0
    assert contract.total_funds() == 6200


def test_refund_blocked_after_accepted_audit(toy_params):
    dep = _Deployment(toy_params)
    contract, _, clock = _deploy_to_claimed(toy_params, dep)
    clock.advance_to(25)
    ch = dep.audit_challenge()
    resp = owner.audit_respond(toy_params, dep.manifest, dep.cts, dep.enc_tags, ch)
    assert contract.audit_verify(N, "own", ch, resp)
    clock.advance_to(T3)
    with pytest.raises(WrongState):
        contract.refund(N)


def test_penalty_single_owner_gets_whole_deposit(toy_params):
    dep = _Deployment(toy_params)
    contract, ledger, clock = _deploy_to_claimed(toy_params, dep)
    clock.advance_to(25)
    ch = dep.audit_challenge()
    resp = owner.audit_respond(toy_params, dep.manifest, dep.cts, dep.enc_tags, ch)
    assert contract.audit_verify(N, "own", ch, resp)
    clock.advance_to(T3)
    shares = contract.penalty(N)
    assert shares == {"own": 1000}
    assert ledger.balance("own") == 500 + 1000
    assert ledger.balance("prov") == 4000
    assert contract.records[N].state == "ABORTED"
    assert contract.total_funds() == 6200


def test_penalty_requires_accepted_audit(toy_params):
    dep = _Deployment(toy_params)
    contract, _, clock = _deploy_to_claimed(toy_params, dep)
    clock.advance_to(T3)
    with pytest.raises(WrongState):
        contract.penalty(N)


def test_penalty_pro_rata_split_with_remainder(toy_params):
    # two successful auditors with stakes 50 and 700 split a 1000 deposit
    # 50/750 and 700/750; integer remainder goes back to the provider
    dep = _Deployment(toy_params)
    contract, ledger, clock = _contract(toy_params)
    contract.service("prov", N, dep.skeys.A.to_bytes(), 1000, T1, T2, T3, T4)
    dep.register(contract)
    clock.advance_to(T1)
    contract.agree("own", N, 50)
    contract.agree("own2", N, 700)
    clock.advance_to(T2)
    contract.claim(N)
    clock.advance_to(25)
    for acct, seed in (("own", 91), ("own2", 92)):
        ch = dep.audit_challenge(seed=seed)
        resp = owner.audit_respond(toy_params, dep.manifest, dep.cts, dep.enc_tags, ch)
        assert contract.audit_verify(N, acct, ch, resp)
    clock.advance_to(T3)
    shares = contract.penalty(N)
    assert shares == {"own": 1000 * 50 // 750, "own2": 1000 * 700 // 750}
    remainder = 1000 - sum(shares.values())
    assert ledger.balance("prov") == 4000 + remainder
    assert contract.total_funds() == 6200


def test_timer_sweeps_residual_escrow(toy_params):
    dep = _Deployment(toy_params)
    contract, ledger, clock = _deploy_to_claimed(toy_params, dep)
    clock.advance_to(T4)
    with pytest.raises(WrongWindow):
        contract.timer(N)  # not yet past T4
    clock.advance_to(T4 + 1)
    contract.timer(N)
    assert contract.records[N].state == "ABORTED"
    assert contract.records[N].escrow == 0
    assert ledger.balance("prov") == 5000 + 50  # deposit plus abandoned stake
    assert contract.total_funds() == 6200


def test_timer_refuses_settled_record(toy_params):
    dep = _Deployment(toy_params)
    contract, _, clock = _deploy_to_claimed(toy_params, dep)
    clock.advance_to(T3)
    contract.refund(N)
    clock.advance_to(T4 + 1)
    with pytest.raises(WrongState):
        contract.timer(N)


def test_transition_log_schema_and_fuzz_legality(toy_params):
    # random op/time fuzzing: failed calls never mutate state, successful
    # ones keep conservation and the log schema
    dep = _Deployment(toy_params)
    rng = SeededRng(b"contract-fuzz")
    for trial in range(60):
        contract, ledger, clock = _contract(toy_params)
        total0 = contract.total_funds()
        ops = [
            lambda: contract.service("prov", N, dep.skeys.A.to_bytes(), 100,
                                     T1, T2, T3, T4),
            lambda: contract.agree("own", N, 50),
            lambda: dep.register(contract),
            lambda: contract.claim(N),
            lambda: contract.refund(N),
            lambda: contract.penalty(N),
            lambda: contract.timer(N),
        ]
        for _ in range(12):
            clock.advance(rng.randrange(7))
            before = {n: (r.state, r.escrow, dict(r.owners))
                      for n, r in contract.records.items()}
            balances_before = ledger.snapshot()
            try:
                ops[rng.randrange(len(ops))]()
            except Exception as exc:
                from sevdel.errors import ContractError
                assert isinstance(exc, ContractError), f"unexpected {exc!r}"
                after = {n: (r.state, r.escrow, dict(r.owners))
                         for n, r in contract.records.items()}
                assert after == before, "failed op mutated state"
                assert ledger.snapshot() == balances_before
            assert contract.total_funds() == total0
        for entry in contract.log:
            assert set(entry) == {"seq", "time", "op", "args_digest",
                                  "state_before", "state_after", "ledger_delta"}
