import math
import os
import subprocess

import pytest

from libra.accountant import PrivacyConfig
from libra.anonymizer import anonymize_subsample
from libra.errors import NotAnonymizable
from libra.evaluator import build_dfg, emd_frequency, emd_time
from libra.log_io import CsvSchema, serialize_csv
from libra.log_model import EventLog, variant_set
from libra.pipeline import cli_main, run
from libra.sampler import RngStream, poisson_sample

from conftest import make_log

IDENTITY_CONFIG = dict(gamma=1.0, zero_noise=True, clip_override=0.0, p_hat=1e-9, omega=0.0)


@pytest.fixture
def big_log():
    return make_log(
        [
            (("receive", "check", "approve"), 300),
            (("receive", "check", "reject"), 250),
            (("receive", "escalate", "check", "approve"), 200),
            (("receive", "check", "escalate", "approve"), 150),
            (("receive", "approve"), 100),
        ]
    )


class TestRun:
    def test_identity_configuration_reproduces_variants(self):
        log = make_log([(("a", "x1", "b"), 2), (("a", "x2", "b"), 2), (("a", "x3", "b"), 2)])
        result = run(log, PrivacyConfig(alpha=10, seed=3, **IDENTITY_CONFIG))
        assert variant_set(result.anonymized_log) == variant_set(log)
        originals = {(t.activities, tuple(e.timestamp for e in t.events)) for t in log.traces}
        for trace in result.anonymized_log.traces:
            assert (trace.activities, tuple(e.timestamp for e in trace.events)) in originals

    def test_identity_configuration_zero_emd(self, identity_log):
        result = run(identity_log, PrivacyConfig(alpha=10, seed=0, **IDENTITY_CONFIG))
        original, anonymized = build_dfg(identity_log), build_dfg(result.anonymized_log)
        assert emd_frequency(original, anonymized) == 0.0
        assert emd_time(original, anonymized) == 0.0

    def test_clinic_log_clipped_empty_with_warning(self, clinic_log):
        result = run(clinic_log, PrivacyConfig(alpha=2, b=2.0, delta=1e-4))
        assert result.report.clipping_threshold_C == pytest.approx(
            math.log(6 / 1e-4) / 0.2003, rel=1e-3
        )
        assert result.anonymized_log.case_count == 0
        assert any("empty" in w for w in result.warnings)
        assert result.report.cases_after == 0
        assert result.report.epsilon_prime_dp > 0

    def test_empty_log(self):
        result = run(EventLog(), PrivacyConfig(alpha=2))
        assert result.anonymized_log.case_count == 0
        assert result.report.clipping_threshold_C is None
        assert result.warnings

    def test_all_unique_raises(self):
        log = make_log([((f"s{i}", f"e{i}"), 1) for i in range(6)])
        with pytest.raises(NotAnonymizable):
            run(log, PrivacyConfig(alpha=10))

    def test_deterministic_under_seed(self, big_log):
        config = PrivacyConfig(alpha=10, seed=5)
        assert run(big_log, config).anonymized_log == run(big_log, config).anonymized_log

    def test_variant_subset_across_seeds(self, big_log):
        allowed = variant_set(big_log)
        for seed in range(20):
            result = run(big_log, PrivacyConfig(alpha=10, seed=seed))
            assert variant_set(result.anonymized_log) <= allowed

    def test_pre_pick_case_count_envelope(self, big_log):
        # Binomial(z, gamma) per round, eta rounds, plus count noise; the
        # relevance picking that follows is checked separately
        z = big_log.case_count
        config = PrivacyConfig(alpha=10, seed=2)
        total = 0
        for r in range(20):
            gen = RngStream(config.seed, r).generator()
            sample = poisson_sample(big_log, config.gamma, gen, round_index=r)
            total += len(anonymize_subsample(sample, config, gen, epoch=big_log.epoch).traces)
        assert 0.5 * z <= total <= 1.5 * z

    def test_parallel_serial_equivalence(self, big_log):
        serial = run(big_log, PrivacyConfig(alpha=10, seed=9, threads=1))
        threaded = run(big_log, PrivacyConfig(alpha=10, seed=9, threads=8))
        assert serial.anonymized_log == threaded.anonymized_log
        assert serial.report == threaded.report

    def test_round_qualified_ids_unique(self, big_log):
        result = run(big_log, PrivacyConfig(alpha=10, seed=1))
        ids = [t.case_id for t in result.anonymized_log.traces]
        assert len(ids) == len(set(ids))
        assert all(i.startswith("r") for i in ids)

    def test_eta_literal_runs_gamma_z_rounds(self, big_log):
        result = run(big_log, PrivacyConfig(alpha=10, seed=1, eta_literal=True))
        assert result.report.eta == math.ceil(0.05 * big_log.case_count)

    def test_budget_monotone_in_alpha(self, big_log):
        values = [
            run(big_log, PrivacyConfig(alpha=a, seed=0)).report.epsilon_composed_rdp
            for a in (2, 3, 5, 10, 20, 50, 100)
        ]
        assert all(x <= y + 1e-15 for x, y in zip(values, values[1:]))


def write_log(path, log, schema=None):
    path.write_bytes(serialize_csv(log, schema))
    return str(path)


class TestCli:
    def test_anonymize_writes_files(self, tmp_path, big_log):
        inp = write_log(tmp_path / "in.csv", big_log)
        out, rep = str(tmp_path / "out.csv"), str(tmp_path / "rep.txt")
        code = cli_main(["--input", inp, "--alpha", "10", "--output", out, "--report", rep, "--seed", "42"])
        assert code == 0
        assert os.path.getsize(out) > 0
        report = open(rep).read()
        assert "epsilon_prime_dp =" in report and "eta =" in report

    def test_missing_input_usage_error(self, capsys):
        assert cli_main(["--alpha", "10", "--output", "x.csv"]) == 2
        assert "usage" in capsys.readouterr().err

    def test_no_arguments_usage_error(self):
        assert cli_main([]) == 2

    def test_all_unique_exit_code(self, tmp_path, capsys):
        log = make_log([((f"s{i}", f"e{i}"), 1) for i in range(5)])
        inp = write_log(tmp_path / "in.csv", log)
        code = cli_main(["--input", inp, "--alpha", "10", "--output", str(tmp_path / "o.csv")])
        assert code == 1
        assert "not anonymizable" in capsys.readouterr().err

    def test_unreadable_input_exit_code(self, tmp_path, capsys):
        code = cli_main(["--input", str(tmp_path / "missing.csv"), "--alpha", "10",
                         "--output", str(tmp_path / "o.csv")])
        assert code == 2

    def test_parse_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("case_id,activity,timestamp\n1,A,not-a-time\n")
        code = cli_main(["--input", str(bad), "--alpha", "10", "--output", str(tmp_path / "o.csv")])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_clipped_empty_warns(self, tmp_path, clinic_log, capsys):
        inp = write_log(tmp_path / "in.csv", clinic_log)
        out = str(tmp_path / "out.csv")
        code = cli_main(["--input", inp, "--alpha", "2", "--output", out,
                         "--report", str(tmp_path / "rep.txt")])
        assert code == 0
        assert "empty" in capsys.readouterr().err
        assert open(out).read() == "case_id,activity,timestamp\n"

    def test_byte_identical_outputs(self, tmp_path, big_log):
        inp = write_log(tmp_path / "in.csv", big_log)
        outs = []
        for name, threads in (("a", "1"), ("b", "1"), ("c", "8")):
            out, rep = str(tmp_path / f"{name}.csv"), str(tmp_path / f"{name}.txt")
            assert cli_main(["--input", inp, "--alpha", "10", "--seed", "7",
                             "--threads", threads, "--output", out, "--report", rep]) == 0
            outs.append((open(out, "rb").read(), open(rep, "rb").read()))
        assert outs[0] == outs[1] == outs[2]

    def test_seed_env_override(self, tmp_path, big_log, monkeypatch):
        inp = write_log(tmp_path / "in.csv", big_log)
        out_a, out_b = str(tmp_path / "a.csv"), str(tmp_path / "b.csv")
        monkeypatch.setenv("LIBRA_SEED", "99")
        assert cli_main(["--input", inp, "--alpha", "10", "--seed", "0", "--output", out_a]) == 0
        monkeypatch.delenv("LIBRA_SEED")
        assert cli_main(["--input", inp, "--alpha", "10", "--seed", "99", "--output", out_b]) == 0
        assert open(out_a, "rb").read() == open(out_b, "rb").read()

    def test_explicit_anonymize_subcommand(self, tmp_path, big_log):
        inp = write_log(tmp_path / "in.csv", big_log)
        code = cli_main(["anonymize", "--input", inp, "--alpha", "10",
                         "--output", str(tmp_path / "o.csv")])
        assert code == 0

    def test_custom_schema_round_trip(self, tmp_path, big_log):
        schema = CsvSchema(
            case_column="Case", activity_column="Act", timestamp_column="When",
            timestamp_format="%d.%m.%Y %H:%M:%S", delimiter=";",
        )
        inp = write_log(tmp_path / "in.csv", big_log, schema)
        out = str(tmp_path / "out.csv")
        code = cli_main(["--input", inp, "--case-col", "Case", "--activity-col", "Act",
                         "--timestamp-col", "When", "--timestamp-format", "%d.%m.%Y %H:%M:%S",
                         "--delimiter", ";", "--alpha", "10", "--output", out])
        assert code == 0
        assert open(out).readline().strip() == "Case;Act;When"

    def test_xes_input(self, tmp_path):
        xes = """<log>
          <trace><string key="concept:name" value="1"/>
            <event><string key="concept:name" value="a"/><date key="time:timestamp" value="2021-04-08T09:00:00+00:00"/></event>
            <event><string key="concept:name" value="b"/><date key="time:timestamp" value="2021-04-08T09:30:00+00:00"/></event>
          </trace>
          <trace><string key="concept:name" value="2"/>
            <event><string key="concept:name" value="a"/><date key="time:timestamp" value="2021-04-08T10:00:00+00:00"/></event>
            <event><string key="concept:name" value="b"/><date key="time:timestamp" value="2021-04-08T10:30:00+00:00"/></event>
          </trace>
        </log>"""
        path = tmp_path / "in.xes"
        path.write_text(xes)
        out = str(tmp_path / "out.csv")
        code = cli_main(["--input", str(path), "--format", "xes", "--alpha", "10",
                         "--gamma", "1.0", "--clip-override", "0", "--output", out])
        assert code == 0

    def test_evaluate_prints_expected_lines(self, tmp_path, big_log, capsys):
        inp = write_log(tmp_path / "in.csv", big_log)
        code = cli_main(["evaluate", "--original", inp, "--anonymized", inp])
        assert code == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0] == "emd_freq = 0.0"
        assert lines[1] == "emd_time_hours = 0.0"

    def test_console_script_installed(self, tmp_path, big_log):
        inp = write_log(tmp_path / "in.csv", big_log)
        proc = subprocess.run(
            ["libra", "--input", inp, "--alpha", "10", "--seed", "1",
             "--output", str(tmp_path / "o.csv")],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
