"""Command-line harness.

``run-scenario`` executes a declarative scenario file and writes its
JSONL transcript; ``verify``, ``delete`` and ``audit`` are preset
scenarios over a supplied or seeded file.  ``setup``/``outsource``/
``encrypt`` materialize protocol artifacts on disk.  Note that an
encryption key lives only inside its in-process enclave -- by design it
does not survive the invocation, so decryption and proving happen inside
composite runs, never across separate processes.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import cloud, codec, owner, wire
from .enclave import EnclaveRegistry
from .errors import SevdelError
from .groups import scalar_from_bytes, scalar_to_bytes, setup as group_setup, vgen_points
from .rng import SeededRng
from .scenario import Scenario, bench as run_bench, bench_csv, run_scenario

_seed_opt = click.option("--seed", default=1, show_default=True, help="Deterministic run seed.")
_out_opt = click.option("--out", type=click.Path(path_type=Path), default=Path("sevdel-out"),
                        show_default=True, help="Artifact/transcript directory.")
_sectors_opt = click.option("--sectors", default=8, show_default=True,
                            help="Sectors per block (s).")
_bits_opt = click.option("--sector-bits", default=16, show_default=True,
                         type=click.Choice(["8", "16", "32"]), help="Sector width in bits.")
_count_opt = click.option("--challenge-count", default=8, show_default=True,
                          help="Blocks sampled per challenge.")
_group_opt = click.option("--group", default="bn254", show_default=True,
                          type=click.Choice(["bn254", "toy"]), help="Pairing backend.")


@click.group()
def main():
    """Secure-and-verifiable deletion protocol simulator."""


def _write(out: Path, name: str, data) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    if isinstance(data, bytes):
        path.write_bytes(data)
    else:
        path.write_text(data)
    return path


def _load_params(out: Path):
    cfg = json.loads((out / "params.json").read_text())
    return group_setup(cfg["group"], cfg["sector_bits"]), cfg


@main.command()
@_group_opt
@_bits_opt
@_seed_opt
@_out_opt
def setup(group, sector_bits, seed, out):
    """Bootstrap system parameters and the provider key pair."""
    params = group_setup(group, int(sector_bits))
    skeys = cloud.server_keygen(params, SeededRng(seed).child("server-keys"))
    _write(out, "params.json", json.dumps(
        {"group": group, "sector_bits": int(sector_bits),
         "params_digest": params.digest().hex()}, indent=2, sort_keys=True))
    _write(out, "provider.json", json.dumps(
        {"a": scalar_to_bytes(params.group, skeys.a).hex(),
         "A": skeys.A.hex()}, indent=2, sort_keys=True))
    click.echo(f"wrote params.json and provider.json to {out}")


@main.command()
@click.option("--file", "file_path", type=click.Path(exists=True, path_type=Path),
              required=True, help="File to outsource.")
@_sectors_opt
@_seed_opt
@_out_opt
@click.option("--owner-id", default="owner", show_default=True)
def outsource(file_path, sectors, seed, out, owner_id):
    """Split the file, generate owner keys and per-block tags."""
    params, _ = _load_params(out)
    data = file_path.read_bytes()
    manifest, blocks = codec.split(data, sectors, params.sector_bits,
                                   owner_id=owner_id.encode(),
                                   file_name=file_path.name.encode())
    rng = SeededRng(seed)
    okeys = owner.keygen(params, rng.child("owner-keys"))
    gens, tags = owner.outsource(params, okeys, manifest, blocks, rng.child("outsource"))
    _write(out, "manifest.json", manifest.to_json())
    _write(out, "blocks.bin", wire.encode_blocks(manifest, blocks))
    _write(out, "tags.bin", wire.encode_tagset(tags))
    _write(out, "owner.json", json.dumps(
        {"w": scalar_to_bytes(params.group, okeys.w).hex(),
         "W": okeys.W.hex(),
         "x": [scalar_to_bytes(params.group, xj).hex() for xj in gens.x],
         "u": [e.hex() for e in gens.u]}, indent=2, sort_keys=True))
    click.echo(f"outsourced {file_path} as {manifest.n}x{manifest.s} blocks "
               f"(file id {manifest.file_id.hex()[:16]}...)")


@main.command()
@_seed_opt
@_out_opt
def encrypt(seed, out):
    """Encrypt previously outsourced blocks and tag the ciphertexts.

    The enclave (and hence the decryption key) exists only for the
    duration of this invocation; that is the deletion guarantee at work.
    """
    params, _ = _load_params(out)
    manifest = codec.FileManifest.from_json((out / "manifest.json").read_text())
    blocks = wire.decode_blocks((out / "blocks.bin").read_bytes())
    owner_pub = json.loads((out / "owner.json").read_text())
    u = tuple(params.g1_from_bytes(bytes.fromhex(h)) for h in owner_pub["u"])
    provider = json.loads((out / "provider.json").read_text())
    skeys = cloud.ServerKeyPair(
        a=scalar_from_bytes(params.group, bytes.fromhex(provider["a"])),
        A=params.g2_from_bytes(bytes.fromhex(provider["A"])))
    registry = EnclaveRegistry()
    enclave = registry.create(manifest.file_id)
    rng = SeededRng(seed)
    cts, v_pub = cloud.encrypt_file(params, enclave, manifest, blocks, rng.child("encrypt"))
    enc_tags = cloud.gen_enc_tags(params, skeys, manifest, cts, u,
                                  vgen_points(params, manifest.file_id, manifest.s))
    _write(out, "ciphertext.bin", wire.encode_ciphertexts(params, cts))
    _write(out, "enc_tags.bin", wire.encode_enc_tagset(enc_tags))
    _write(out, "encryption.json", json.dumps(
        {"V": v_pub.hex(), "enclave_id": enclave.enclave_id,
         "note": "the enclave and its key die with this process"},
        indent=2, sort_keys=True))
    click.echo(f"encrypted {manifest.n}x{manifest.s} sectors under enclave "
               f"{enclave.enclave_id}")


def _preset(name: str, seed: int, group: str, sectors: int, sector_bits: str,
            challenge_count: int, file_path: Path | None, file_size: int = 4096) -> Scenario:
    base = {
        "seed": seed,
        "group": group,
        "sectors_per_block": sectors,
        "sector_bits": int(sector_bits),
        "challenge_count": challenge_count,
        "file_size": file_size,
        "file_path": str(file_path) if file_path else None,
    }
    common = [
        {"time": 0, "action": "setup"},
        {"time": 1, "action": "service"},
        {"time": 2, "action": "outsource"},
        {"time": 3, "action": "encrypt"},
        {"time": 4, "action": "register_tags"},
        {"time": 12, "action": "agree"},
        {"time": 20, "action": "claim"},
    ]
    if name == "verify":
        return Scenario(name="cli-verify", timeline=common + [
            {"time": 21, "action": "verify_encryption"},
            {"time": 22, "action": "decrypt_roundtrip"},
            {"time": 30, "action": "refund"},
        ], expect={"verify": "accept", "roundtrip": "match"}, **base)
    if name == "delete":
        return Scenario(name="cli-delete", timeline=common + [
            {"time": 21, "action": "verify_encryption"},
            {"time": 25, "action": "delete"},
            {"time": 26, "action": "decrypt_roundtrip"},
            {"time": 30, "action": "refund"},
        ], expect={"verify": "accept", "delete": "ok",
                   "roundtrip": "enclave-destroyed"}, **base)
    if name == "audit":
        return Scenario(name="cli-audit", timeline=common + [
            {"time": 25, "action": "audit"},
            {"time": 30, "action": "penalty"},
        ], faults=[{"type": "leak-ciphertexts"}],
            expect={"audit": "accept", "final_state": "ABORTED"}, **base)
    raise ValueError(name)


def _run_and_report(sc: Scenario, out: Path) -> None:
    transcript = run_scenario(sc)
    path = _write(out, f"transcript-{sc.name}.jsonl", transcript.to_text())
    for key, value in sorted(transcript.verdicts.items()):
        click.echo(f"{key}: {value}")
    click.echo(f"transcript: {path}")
    if not transcript.ok:
        for failure in transcript.failures:
            click.echo(f"FAILED: {failure}", err=True)
        sys.exit(1)
    click.echo("ok")


def _composite(name):
    @click.option("--file", "file_path", type=click.Path(exists=True, path_type=Path),
                  default=None, help="Use this file instead of seeded bytes.")
    @_group_opt
    @_sectors_opt
    @_bits_opt
    @_count_opt
    @_seed_opt
    @_out_opt
    def cmd(file_path, group, sectors, sector_bits, challenge_count, seed, out):
        sc = _preset(name, seed, group, sectors, sector_bits, challenge_count, file_path)
        _run_and_report(sc, out)
    cmd.__name__ = name
    return cmd


main.command(name="verify", help="End-to-end encryption verification over one file.")(_composite("verify"))
main.command(name="delete", help="Owner-signed deletion with post-delete failure demo.")(_composite("delete"))
main.command(name="audit", help="Leakage audit against the contract; executes the penalty.")(_composite("audit"))


@main.command(name="run-scenario")
@click.argument("scenario_file", type=click.Path(exists=True, path_type=Path))
@_out_opt
def run_scenario_cmd(scenario_file, out):
    """Execute a declarative scenario file; exit 0 iff expectations hold."""
    try:
        sc = Scenario.from_json(scenario_file.read_text())
        _run_and_report(sc, out)
    except SevdelError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


@main.command()
@click.option("--sizes", default="65536,1048576", show_default=True,
              help="Comma-separated file sizes in bytes.")
@click.option("--reps", default=3, show_default=True)
@click.option("--group", default="toy", show_default=True,
              type=click.Choice(["bn254", "toy"]),
              help="Backend to measure (bn254 is slow above a few KiB).")
@_sectors_opt
@_bits_opt
@_count_opt
@_seed_opt
@_out_opt
def bench(sizes, reps, group, sectors, sector_bits, challenge_count, seed, out):
    """Measure per-phase wall time and proof sizes; write CSV."""
    size_list = [int(v) for v in sizes.split(",") if v]
    rows = run_bench(size_list, reps=reps, group=group, s=sectors,
                     sector_bits=int(sector_bits),
                     challenge_count=challenge_count, seed=seed)
    csv_text = bench_csv(rows)
    path = _write(out, "bench.csv", csv_text)
    click.echo(csv_text.rstrip())
    click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
