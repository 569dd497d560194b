"""Scenario engine: seeded end-to-end protocol runs with JSONL transcripts.

A scenario fixes the group, file shape, contract terms and a timeline of
actions at logical times, plus optional fault injections.  The same seed
always yields a byte-identical transcript: all randomness flows from one
SHAKE stream, time is the contract's logical clock, and every transcript
line is canonical JSON.  Bulk artifacts (file, ciphertexts, tag sets)
appear in the transcript as digests; protocol messages (challenges,
proofs, audit responses, receipts, contract log entries) appear whole.
"""

from __future__ import annotations

import hashlib
import json
import time as _time
from dataclasses import dataclass, field

from . import cloud, codec, owner, wire
from .contract import Contract, Ledger, LogicalClock, verify_audit_response
from .enclave import EnclaveRegistry
from .errors import (
    EnclaveDestroyed,
    MissingBlock,
    ScenarioError,
    SevdelError,
    UnknownFile,
)
from .groups import SystemParams, setup, vgen_points
from .rng import SeededRng

PROVIDER = "provider"
OWNER = "owner"

_ACTIONS = (
    "setup", "service", "agree", "outsource", "encrypt", "register_tags",
    "claim", "verify_encryption", "decrypt_roundtrip", "leak", "audit",
    "delete", "refund", "penalty", "timer",
)
_FAULTS = ("skip-encryption", "tamper-block", "leak-ciphertexts", "double-delete")


@dataclass
class Scenario:
    name: str
    seed: int
    group: str = "toy"
    file_size: int = 4096
    sectors_per_block: int = 8
    sector_bits: int = 16
    challenge_count: int = 4
    deposit: int = 1000
    stake: int = 50
    deadlines: dict = field(default_factory=lambda: {"t1": 10, "t2": 20, "t3": 30, "t4": 40})
    initial_balances: dict = field(default_factory=lambda: {PROVIDER: 5000, OWNER: 500})
    timeline: list = field(default_factory=list)
    faults: list = field(default_factory=list)
    expect: dict = field(default_factory=dict)
    file_path: str | None = None    # bytes come from disk instead of the seed

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario is not valid JSON: {exc}") from exc
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ScenarioError(f"unknown scenario fields: {sorted(unknown)}")
        try:
            sc = cls(**d)
        except TypeError as exc:
            raise ScenarioError(str(exc)) from exc
        sc.validate()
        return sc

    def validate(self) -> None:
        if not self.timeline:
            raise ScenarioError("scenario has an empty timeline")
        dl = self.deadlines
        if not all(k in dl for k in ("t1", "t2", "t3", "t4")):
            raise ScenarioError("deadlines must name t1..t4")
        if not dl["t1"] < dl["t2"] < dl["t3"] < dl["t4"]:
            raise ScenarioError("deadlines must satisfy T1 < T2 < T3 < T4")
        last = -1
        for step in self.timeline:
            if "time" not in step or "action" not in step:
                raise ScenarioError(f"timeline step needs time and action: {step}")
            if step["action"] not in _ACTIONS:
                raise ScenarioError(f"unknown action {step['action']!r}")
            if step["time"] < last:
                raise ScenarioError("timeline times must be non-decreasing")
            last = step["time"]
        for fault in self.faults:
            if fault.get("type") not in _FAULTS:
                raise ScenarioError(f"unknown fault {fault!r}")
        if self.file_size < 1:
            raise ScenarioError("file_size must be positive")


class Transcript:
    def __init__(self, scenario_name: str):
        self.lines: list[dict] = []
        self.verdicts: dict[str, object] = {}
        self.failures: list[str] = []
        self._seq = 0
        self._name = scenario_name

    def emit(self, time: int, event: str, **payload) -> None:
        self._seq += 1
        self.lines.append({"seq": self._seq, "time": time, "event": event, **payload})

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_text(self) -> str:
        return "".join(json.dumps(line, sort_keys=True) + "\n" for line in self.lines)

    def dump(self, fp) -> None:
        fp.write(self.to_text())


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class _Runner:
    def __init__(self, sc: Scenario):
        self.sc = sc
        self.rng = SeededRng(sc.seed).child(b"scenario:" + sc.name.encode())
        self.clock = LogicalClock()
        self.transcript = Transcript(sc.name)
        self.params: SystemParams = setup(sc.group, sc.sector_bits)
        self.ledger = Ledger(dict(sc.initial_balances))
        self.contract = Contract(self.params, self.ledger, self.clock)
        self.registry = EnclaveRegistry(clock=self.clock)
        self.n_ref = f"file-{sc.name}"
        self.okeys = None
        self.skeys = None
        self.data = None
        self.manifest = None
        self.blocks = None
        self.gens = None
        self.tags = None
        self.enclave = None
        self.cts = None
        self.v_pub = None
        self.enc_tags = None
        self.leaked = None

    def fault(self, kind: str):
        for f in self.sc.faults:
            if f.get("type") == kind:
                return f
        return None

    def run(self) -> Transcript:
        tr = self.transcript
        tr.emit(0, "scenario", name=self.sc.name, seed=self.sc.seed,
                group=self.sc.group, file_size=self.sc.file_size,
                params_digest=self.contract.params_digest.hex())
        for step in self.sc.timeline:
            self.clock.advance_to(step["time"])
            getattr(self, "_do_" + step["action"].replace("-", "_"))(step)
        self._append_contract_log()
        self._check_expectations()
        return tr

    # -- actions --------------------------------------------------------

    def _do_setup(self, step):
        sc = self.sc
        self.okeys = owner.keygen(self.params, self.rng.child("owner-keys"))
        self.skeys = cloud.server_keygen(self.params, self.rng.child("server-keys"))
        if sc.file_path is not None:
            with open(sc.file_path, "rb") as fh:
                self.data = fh.read()
            if not self.data:
                raise ScenarioError(f"{sc.file_path} is empty")
        else:
            self.data = self.rng.child("file").read(sc.file_size)
        self.transcript.emit(self.clock.now, "setup",
                             owner_pub=self.okeys.W.hex(),
                             provider_pub=self.skeys.A.hex(),
                             file_digest=_digest(self.data))

    def _do_service(self, step):
        dl = self.sc.deadlines
        self.contract.service(PROVIDER, self.n_ref, self.skeys.A.to_bytes(),
                              self.sc.deposit, dl["t1"], dl["t2"], dl["t3"], dl["t4"])
        self.transcript.emit(self.clock.now, "service", n=self.n_ref,
                             deposit=self.sc.deposit, deadlines=dl)

    def _do_agree(self, step):
        self.contract.agree(OWNER, self.n_ref, self.sc.stake)
        self.transcript.emit(self.clock.now, "agree", owner=OWNER, stake=self.sc.stake)

    def _do_outsource(self, step):
        sc = self.sc
        self.manifest, self.blocks = codec.split(
            self.data, sc.sectors_per_block, sc.sector_bits,
            owner_id=OWNER.encode(), file_name=sc.name.encode())
        self.gens, self.tags = owner.outsource(
            self.params, self.okeys, self.manifest, self.blocks,
            self.rng.child("outsource"))
        self.transcript.emit(self.clock.now, "outsource",
                             manifest=json.loads(self.manifest.to_json()),
                             tags_digest=_digest(wire.encode_tagset(self.tags)))

    def _do_encrypt(self, step):
        self.enclave = self.registry.create(self.manifest.file_id)
        self.cts, self.v_pub = cloud.encrypt_file(
            self.params, self.enclave, self.manifest, self.blocks,
            self.rng.child("encrypt"))
        self._apply_ciphertext_faults()
        v_gens = vgen_points(self.params, self.manifest.file_id, self.manifest.s)
        self.enc_tags = cloud.gen_enc_tags(
            self.params, self.skeys, self.manifest, self.cts, self.gens.u, v_gens)
        if self.fault("leak-ciphertexts"):
            self.leaked = self.cts
        self.transcript.emit(self.clock.now, "encrypt",
                             enclave=self.enclave.enclave_id,
                             v_pub=self.v_pub.hex(),
                             ciphertext_digest=_digest(
                                 wire.encode_ciphertexts(self.params, self.cts)),
                             enc_tags_digest=_digest(
                                 wire.encode_enc_tagset(self.enc_tags)))

    def _apply_ciphertext_faults(self):
        group = self.params.group
        g1 = self.params.g1.raw
        skip = self.fault("skip-encryption")
        if skip:
            for i in skip.get("blocks", [1]):
                row = self.blocks.rows[i - 1]
                self.cts.rows_prime[i - 1] = [group.g1_pow(g1, m) for m in row]
                self.cts.rows_dprime[i - 1] = [group.g1_identity() for _ in row]
                self.transcript.emit(self.clock.now, "fault",
                                     type="skip-encryption", block=i)
        tamper = self.fault("tamper-block")
        if tamper:
            i = tamper.get("block", 1)
            self.cts.rows_prime[i - 1] = [
                group.g1_op(raw, g1) for raw in self.cts.rows_prime[i - 1]]
            self.transcript.emit(self.clock.now, "fault", type="tamper-block", block=i)

    def _do_register_tags(self, step):
        sigma_bytes = [e.to_bytes() for e in self.enc_tags.sigma]
        u_bytes = [e.to_bytes() for e in self.gens.u]
        self.contract.register_tags(self.n_ref, self.manifest.file_id,
                                    sigma_bytes, u_bytes)
        self.transcript.emit(self.clock.now, "register_tags", n=self.n_ref,
                             file_id=self.manifest.file_id.hex(),
                             sigma_count=len(sigma_bytes))

    def _do_claim(self, step):
        self.contract.claim(self.n_ref)
        self.transcript.emit(self.clock.now, "claim", n=self.n_ref)

    def _do_verify_encryption(self, step):
        ch = owner.gen_challenge(
            self.manifest, min(self.sc.challenge_count, self.manifest.n),
            self.rng.child("verify-challenge").read(16))
        try:
            proof = cloud.prove_encryption(
                self.params, self.enclave, self.manifest, self.blocks,
                self.cts, self.tags, ch, self.rng.child("prove"))
        except EnclaveDestroyed:
            self.transcript.emit(self.clock.now, "verify_encryption",
                                 challenge=json.loads(ch.canonical_json()),
                                 verdict="enclave-destroyed")
            self.transcript.verdicts["verify"] = "enclave-destroyed"
            return
        ok = owner.verify_encryption_proof(
            self.params, self.manifest, self.gens.u, self.okeys.W,
            self.skeys.A, self.v_pub, ch, proof)
        verdict = "accept" if ok else "reject"
        self.transcript.verdicts["verify"] = verdict
        self.transcript.emit(self.clock.now, "verify_encryption",
                             challenge=json.loads(ch.canonical_json()),
                             proof=json.loads(wire.encode_proof(self.params, proof)),
                             verdict=verdict)

    def _do_decrypt_roundtrip(self, step):
        try:
            back = cloud.decrypt_file(self.params, self.enclave, self.cts)
            verdict = "match" if codec.join(self.manifest, back) == self.data else "mismatch"
        except EnclaveDestroyed:
            verdict = "enclave-destroyed"
        except SevdelError as exc:
            verdict = type(exc).__name__
        self.transcript.verdicts["roundtrip"] = verdict
        self.transcript.emit(self.clock.now, "decrypt_roundtrip", verdict=verdict)

    def _do_leak(self, step):
        self.leaked = self.cts
        self.transcript.emit(self.clock.now, "leak", note="owner obtained ciphertexts")

    def _do_audit(self, step):
        ch = owner.gen_challenge(
            self.manifest, min(self.sc.challenge_count, self.manifest.n),
            self.rng.child("audit-challenge").read(16))
        try:
            resp = owner.audit_respond(
                self.params, self.manifest, self.leaked, self.enc_tags, ch)
        except MissingBlock:
            self.transcript.verdicts["audit"] = "missing-block"
            self.transcript.emit(self.clock.now, "audit",
                                 challenge=json.loads(ch.canonical_json()),
                                 verdict="missing-block")
            return
        ok = self.contract.audit_verify(self.n_ref, OWNER, ch, resp)
        verdict = "accept" if ok else "reject"
        self.transcript.verdicts["audit"] = verdict
        self.transcript.emit(self.clock.now, "audit",
                             challenge=json.loads(ch.canonical_json()),
                             response=json.loads(wire.encode_audit_response(resp)),
                             verdict=verdict)

    def _do_delete(self, step):
        payload, sig = owner.sign_delete_request(
            self.params, self.okeys, self.manifest.file_id, self.clock.now)
        if not owner.verify_delete_request(self.params, self.okeys.W, payload, sig):
            raise ScenarioError("deletion request signature invalid")
        receipt = cloud.delete_file(self.registry, self.manifest.file_id)
        self.transcript.verdicts["delete"] = "ok"
        self.transcript.emit(self.clock.now, "delete",
                             request=json.loads(payload.decode()),
                             signature=sig.hex(),
                             receipt=json.loads(receipt.to_json()),
                             zeroized=self.enclave.verify_zeroized())
        if self.fault("double-delete"):
            try:
                cloud.delete_file(self.registry, self.manifest.file_id)
                self.transcript.verdicts["double_delete"] = "unexpected-success"
            except UnknownFile:
                self.transcript.verdicts["double_delete"] = "unknown-file"
            self.transcript.emit(self.clock.now, "delete",
                                 repeat=True,
                                 verdict=self.transcript.verdicts["double_delete"])

    def _do_refund(self, step):
        self.contract.refund(self.n_ref)
        self.transcript.emit(self.clock.now, "refund", n=self.n_ref)

    def _do_penalty(self, step):
        shares = self.contract.penalty(self.n_ref)
        self.transcript.verdicts["penalty_shares"] = shares
        self.transcript.emit(self.clock.now, "penalty", n=self.n_ref, shares=shares)

    def _do_timer(self, step):
        self.contract.timer(self.n_ref)
        self.transcript.emit(self.clock.now, "timer", n=self.n_ref)

    # -- wrap-up -----------------------------------------------------------

    def _append_contract_log(self):
        for entry in self.contract.log:
            payload = {k: v for k, v in entry.items() if k not in ("time", "seq")}
            self.transcript.emit(entry["time"], "contract",
                                 contract_seq=entry["seq"], **payload)
        self.transcript.emit(self.clock.now, "ledger",
                             balances=self.ledger.snapshot(),
                             total_funds=self.contract.total_funds())

    def _check_expectations(self):
        tr = self.transcript
        for key, want in self.sc.expect.items():
            if key == "final_state":
                got = self.contract.records[self.n_ref].state if \
                    self.n_ref in self.contract.records else "INIT"
            elif key == "balances":
                got = {acct: self.ledger.balance(acct) for acct in want}
            else:
                got = tr.verdicts.get(key)
            if got != want:
                tr.failures.append(f"expected {key}={want!r}, got {got!r}")
        tr.emit(self.clock.now, "result", ok=tr.ok, failures=tr.failures,
                verdicts={k: v for k, v in sorted(tr.verdicts.items())})


def run_scenario(scenario: Scenario) -> Transcript:
    scenario.validate()
    return _Runner(scenario).run()


# -- benchmarking -------------------------------------------------------------

BENCH_PHASES = ("tagging", "encryption", "proof_gen", "proof_verify", "audit_verify")


def _quantile(values: list[float], q: float) -> float:
    vs = sorted(values)
    idx = min(int(round(q * (len(vs) - 1))), len(vs) - 1)
    return vs[idx]


def bench(
    sizes: list[int],
    reps: int = 3,
    group: str = "toy",
    s: int = 8,
    sector_bits: int = 16,
    challenge_count: int = 4,
    seed: int = 1,
) -> list[dict]:
    """Measure wall time per protocol phase for each file size.

    Returns rows {size_bytes, phase, median_s, p95_s}; one extra row per
    size reports the serialized proof size in bytes.
    """
    rows: list[dict] = []
    for size in sizes:
        params = setup(group, sector_bits)
        rng = SeededRng(seed).child(f"bench-{size}")
        data = rng.child("file").read(size)
        manifest, blocks = codec.split(data, s, sector_bits)
        okeys = owner.keygen(params, rng.child("ok"))
        skeys = cloud.server_keygen(params, rng.child("sk"))
        ch = owner.gen_challenge(manifest, min(challenge_count, manifest.n), seed)
        times: dict[str, list[float]] = {ph: [] for ph in BENCH_PHASES}
        proof_bytes = 0
        for rep in range(reps):
            registry = EnclaveRegistry()
            t0 = _time.perf_counter()
            gens, tags = owner.outsource(params, okeys, manifest, blocks,
                                         rng.child(f"t{rep}"))
            times["tagging"].append(_time.perf_counter() - t0)

            enclave = registry.create(manifest.file_id)
            t0 = _time.perf_counter()
            cts, v_pub = cloud.encrypt_file(params, enclave, manifest, blocks,
                                            rng.child(f"e{rep}"))
            times["encryption"].append(_time.perf_counter() - t0)

            t0 = _time.perf_counter()
            proof = cloud.prove_encryption(params, enclave, manifest, blocks,
                                           cts, tags, ch, rng.child(f"p{rep}"))
            times["proof_gen"].append(_time.perf_counter() - t0)

            t0 = _time.perf_counter()
            ok = owner.verify_encryption_proof(params, manifest, gens.u, okeys.W,
                                               skeys.A, v_pub, ch, proof)
            times["proof_verify"].append(_time.perf_counter() - t0)
            assert ok, "bench run produced a rejected proof"
            proof_bytes = len(wire.encode_proof(params, proof))

            v_gens = vgen_points(params, manifest.file_id, manifest.s)
            enc_tags = cloud.gen_enc_tags(params, skeys, manifest, cts,
                                          gens.u, v_gens)
            resp = owner.audit_respond(params, manifest, cts, enc_tags, ch)
            t0 = _time.perf_counter()
            ok = verify_audit_response(params, manifest.file_id, gens.u, skeys.A,
                                       enc_tags.sigma, ch, resp)
            times["audit_verify"].append(_time.perf_counter() - t0)
            assert ok, "bench run produced a rejected audit"
        for phase in BENCH_PHASES:
            rows.append({
                "size_bytes": size,
                "phase": phase,
                "median_s": round(_quantile(times[phase], 0.5), 6),
                "p95_s": round(_quantile(times[phase], 0.95), 6),
            })
        rows.append({"size_bytes": size, "phase": "proof_size_bytes",
                     "median_s": proof_bytes, "p95_s": proof_bytes})
    return rows


def bench_csv(rows: list[dict]) -> str:
    out = ["size_bytes,phase,median_s,p95_s"]
    for r in rows:
        out.append(f'{r["size_bytes"]},{r["phase"]},{r["median_s"]},{r["p95_s"]}')
    return "\n".join(out) + "\n"
