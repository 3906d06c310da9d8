#!/usr/bin/env python3
"""Generates the synthetic NSL-KDD-format sample under data/synth.

The real KDDTrain+/KDDTest+ files are not redistributable here, so CI and the
CLI integration tests run on this stand-in: same 43-field row format, same
nominal vocabularies, class-conditional numeric signal so classifiers have
something to learn. Regenerate with  python scripts/gen_synth_data.py  (output
is deterministic for a fixed seed).
"""

import argparse
import random
from pathlib import Path

PROTOCOLS = ["tcp", "udp", "icmp"]
SERVICES = ["http", "smtp", "ftp", "ftp_data", "telnet", "domain_u", "private", "ecr_i", "pop_3", "ssh"]
FLAGS = ["SF", "S0", "REJ", "RSTR", "RSTO", "SH", "S1", "OTH"]

ATTACKS = {
    "Normal": ["normal"],
    "DoS": ["neptune", "smurf", "back", "teardrop", "pod", "land"],
    "Probe": ["satan", "ipsweep", "portsweep", "nmap"],
    "R2L": ["guess_passwd", "warezclient", "warezmaster", "ftp_write", "imap", "multihop", "phf", "spy"],
    "U2R": ["buffer_overflow", "rootkit", "loadmodule", "perl"],
}

TRAIN_COUNTS = {"Normal": 1060, "DoS": 640, "Probe": 220, "R2L": 60, "U2R": 20}
TEST_COUNTS = {"Normal": 260, "DoS": 150, "Probe": 60, "R2L": 20, "U2R": 10}


def clamp(v, lo, hi):
    return max(lo, min(hi, v))


def rate(rng, mean, spread=0.1):
    return f"{clamp(rng.gauss(mean, spread), 0.0, 1.0):.2f}"


def make_row(rng, cls):
    # Defaults resemble benign traffic; per-class blocks overwrite the
    # informative columns.
    f = {}
    f["duration"] = 0 if rng.random() < 0.7 else rng.randint(1, 5000)
    f["protocol_type"] = rng.choice(PROTOCOLS)
    f["service"] = rng.choice(SERVICES)
    f["flag"] = "SF"
    f["src_bytes"] = rng.randint(100, 5000)
    f["dst_bytes"] = rng.randint(100, 20000)
    f["land"] = 0
    f["wrong_fragment"] = 0
    f["urgent"] = 0
    f["hot"] = 0
    f["num_failed_logins"] = 0
    f["logged_in"] = 1
    f["num_compromised"] = 0
    f["root_shell"] = 0
    f["su_attempted"] = 0
    f["num_root"] = 0
    f["num_file_creations"] = 0
    f["num_shells"] = 0
    f["num_access_files"] = 0
    f["num_outbound_cmds"] = 0
    f["is_host_login"] = 0
    f["is_guest_login"] = 0
    f["count"] = rng.randint(1, 30)
    f["srv_count"] = rng.randint(1, 25)
    f["serror_rate"] = rate(rng, 0.02, 0.03)
    f["srv_serror_rate"] = rate(rng, 0.02, 0.03)
    f["rerror_rate"] = rate(rng, 0.02, 0.03)
    f["srv_rerror_rate"] = rate(rng, 0.02, 0.03)
    f["same_srv_rate"] = rate(rng, 0.95, 0.05)
    f["diff_srv_rate"] = rate(rng, 0.05, 0.04)
    f["srv_diff_host_rate"] = rate(rng, 0.05, 0.05)
    f["dst_host_count"] = rng.randint(1, 255)
    f["dst_host_srv_count"] = rng.randint(100, 255)
    f["dst_host_same_srv_rate"] = rate(rng, 0.9, 0.08)
    f["dst_host_diff_srv_rate"] = rate(rng, 0.05, 0.04)
    f["dst_host_same_src_port_rate"] = rate(rng, 0.1, 0.1)
    f["dst_host_srv_diff_host_rate"] = rate(rng, 0.05, 0.05)
    f["dst_host_serror_rate"] = rate(rng, 0.02, 0.03)
    f["dst_host_srv_serror_rate"] = rate(rng, 0.02, 0.03)
    f["dst_host_rerror_rate"] = rate(rng, 0.02, 0.03)
    f["dst_host_srv_rerror_rate"] = rate(rng, 0.02, 0.03)

    if cls == "DoS":
        f["flag"] = rng.choice(["S0", "REJ", "RSTR"])
        f["src_bytes"] = rng.randint(0, 60)
        f["dst_bytes"] = 0
        f["logged_in"] = 0
        f["count"] = rng.randint(150, 511)
        f["srv_count"] = rng.randint(150, 511)
        f["serror_rate"] = rate(rng, 0.95, 0.05)
        f["srv_serror_rate"] = rate(rng, 0.95, 0.05)
        f["same_srv_rate"] = rate(rng, 0.08, 0.05)
        f["dst_host_serror_rate"] = rate(rng, 0.95, 0.05)
        f["dst_host_srv_serror_rate"] = rate(rng, 0.95, 0.05)
        f["dst_host_srv_count"] = rng.randint(1, 30)
    elif cls == "Probe":
        f["flag"] = rng.choice(["REJ", "RSTR", "SH", "SF"])
        f["protocol_type"] = rng.choice(["tcp", "icmp"])
        f["src_bytes"] = rng.randint(0, 40)
        f["dst_bytes"] = rng.randint(0, 40)
        f["logged_in"] = 0
        f["count"] = rng.randint(80, 300)
        f["srv_count"] = rng.randint(1, 12)
        f["diff_srv_rate"] = rate(rng, 0.8, 0.1)
        f["same_srv_rate"] = rate(rng, 0.12, 0.08)
        f["rerror_rate"] = rate(rng, 0.7, 0.15)
        f["srv_rerror_rate"] = rate(rng, 0.7, 0.15)
        f["dst_host_diff_srv_rate"] = rate(rng, 0.75, 0.12)
        f["dst_host_same_src_port_rate"] = rate(rng, 0.85, 0.1)
        f["dst_host_rerror_rate"] = rate(rng, 0.7, 0.15)
    elif cls == "R2L":
        f["service"] = rng.choice(["ftp", "telnet", "pop_3", "ftp_data"])
        f["duration"] = rng.randint(1, 800)
        f["num_failed_logins"] = rng.randint(1, 5)
        f["logged_in"] = rng.choice([0, 1])
        f["is_guest_login"] = rng.choice([0, 1])
        f["hot"] = rng.randint(1, 30)
        f["count"] = rng.randint(1, 5)
        f["srv_count"] = rng.randint(1, 5)
        f["dst_host_srv_count"] = rng.randint(1, 40)
    elif cls == "U2R":
        f["service"] = rng.choice(["telnet", "ftp_data", "ssh"])
        f["duration"] = rng.randint(30, 2000)
        f["root_shell"] = 1
        f["num_root"] = rng.randint(1, 80)
        f["num_compromised"] = rng.randint(1, 10)
        f["num_file_creations"] = rng.randint(1, 25)
        f["num_shells"] = rng.randint(1, 4)
        f["hot"] = rng.randint(1, 20)
        f["count"] = rng.randint(1, 4)
        f["srv_count"] = rng.randint(1, 4)

    order = [
        "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes", "land",
        "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in", "num_compromised",
        "root_shell", "su_attempted", "num_root", "num_file_creations", "num_shells",
        "num_access_files", "num_outbound_cmds", "is_host_login", "is_guest_login", "count",
        "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate", "srv_rerror_rate",
        "same_srv_rate", "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
        "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
        "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
        "dst_host_srv_serror_rate", "dst_host_rerror_rate", "dst_host_srv_rerror_rate",
    ]
    attack = rng.choice(ATTACKS[cls])
    difficulty = rng.randint(15, 21)
    return ",".join(str(f[k]) for k in order) + f",{attack},{difficulty}"


def write_split(path, counts, rng):
    rows = []
    for cls, n in counts.items():
        rows.extend(make_row(rng, cls) for _ in range(n))
    rng.shuffle(rows)
    path.write_text("\n".join(rows) + "\n")
    print(f"{path}: {len(rows)} rows")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=20240917)
    parser.add_argument("--out-dir", default="data/synth")
    args = parser.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_split(out / "KDDTrain+.txt", TRAIN_COUNTS, rng)
    write_split(out / "KDDTest+.txt", TEST_COUNTS, rng)


if __name__ == "__main__":
    main()
