"""
Backscatter SWIPT security simulator - command line entry point
"""
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import click
from rich.console import Console
from rich.table import Table

# Add current directory to path for imports
current_dir = str(Path(__file__).parent)
if current_dir not in sys.path:
    sys.path.insert(0, current_dir)

from core.adversary import estimate_replay_acceptance
from core.auth import Strategy
from core.codec import ber_estimate, ber_standard_error, theoretical_ber
from core.exceptions import LinkBudgetError, ScenarioValidationError
from core.rf_link import DEFAULT_CARRIER_HZ, link_budget_summary
from services.archive_service import ArchiveError, ArchiveService
from services.file_manager import FileManager
from services.scenario_loader import list_presets, load_scenario
from services.simulation_service import run as run_scenario, sweep as sweep_scenario
from utils.config import config
from utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2

console = Console()


@dataclass(frozen=True)
class RunConfig:
    """Arguments of one ``run`` invocation"""
    scenario_path: str
    seed: Optional[int] = None
    output_path: Optional[Path] = None
    format: str = "json"
    verbosity: int = 0
    archive: bool = False


def _diagnostic(message: str):
    click.echo(f"error: {message}".replace("\n", " "), err=True)


def _parse_values(spec: str) -> List[float]:
    """``a,b,c`` or ``start:stop:step`` (stop inclusive)"""
    spec = spec.strip()
    if ":" in spec:
        parts = [float(p) for p in spec.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise click.BadParameter(f"range must be start:stop:step with step > 0, got {spec!r}")
        start, stop, step = parts
        count = int(round((stop - start) / step)) + 1
        return [round(start + i * step, 9) for i in range(count)]
    try:
        return [float(p) for p in spec.split(",") if p.strip()]
    except ValueError:
        raise click.BadParameter(f"not a number list: {spec!r}")


class SimulatorCLI:
    """CLI operations; each returns the process exit code"""

    def __init__(self):
        self.file_manager = FileManager()

    def cmd_run(self, run_config: RunConfig) -> int:
        try:
            scenario = load_scenario(run_config.scenario_path)
        except ScenarioValidationError as e:
            _diagnostic(str(e))
            return EXIT_VALIDATION
        except OSError as e:
            _diagnostic(f"cannot read scenario: {e}")
            return EXIT_IO

        if run_config.seed is not None:
            scenario = scenario.with_seed(run_config.seed)
        report = run_scenario(scenario)

        try:
            path = self.file_manager.write_report(report, run_config.output_path, run_config.format)
        except OSError as e:
            _diagnostic(f"cannot write report: {e}")
            return EXIT_IO

        if run_config.archive:
            try:
                run_id = ArchiveService().archive_run(report, path)
                console.print(f"[green]✓ Archived as run {run_id}[/green]")
            except ArchiveError as e:
                _diagnostic(str(e))
                return EXIT_IO

        self._print_summary(report)
        console.print(f"[green]✓ Report written: {path}[/green]")
        return EXIT_OK

    def _print_summary(self, report):
        table = Table(title=f"Run summary: {report.scenario['name']} (seed {report.scenario['seed']})")
        table.add_column("Metric", style="cyan")
        table.add_column("Value", style="green")
        for key, value in report.summary.items():
            if isinstance(value, float):
                value = f"{value:.4g}"
            table.add_row(key, str(value))
        for verdict, count in report.gateway["verdicts"].items():
            table.add_row(f"gateway {verdict}", str(count))
        console.print(table)

    def cmd_validate(self, scenarios: List[str]) -> int:
        code = EXIT_OK
        for name in scenarios:
            try:
                scenario = load_scenario(name)
                console.print(f"[green]✓ {name}: valid ({len(scenario.nodes)} node(s), "
                              f"{len(scenario.attackers)} attacker(s))[/green]")
            except ScenarioValidationError as e:
                _diagnostic(str(e))
                code = max(code, EXIT_VALIDATION)
            except OSError as e:
                _diagnostic(f"cannot read scenario: {e}")
                code = EXIT_IO
        return code

    def cmd_linkbudget(self, p_source: float, isolation: float, forward_loss: float, s11: float,
                       distance: Optional[float], freq: float, tx_gain: float, node_gain: float) -> int:
        summary = link_budget_summary(p_source, isolation, forward_loss, s11, distance, freq, tx_gain, node_gain)
        table = Table(title="Link budget")
        table.add_column("Quantity", style="cyan")
        table.add_column("Value", style="green", justify="right")
        labels = [
            ("p_leak_dbm", "P_leak", "dBm"),
            ("p_refl_dbm", "P_refl (wired)", "dBm"),
            ("delta_p_db", "ΔP (wired)", "dB"),
            ("eirp_dbm", "EIRP", "dBm"),
            ("fspl_db", "FSPL", "dB"),
            ("p_incident_dbm", "P_incident", "dBm"),
            ("p_return_dbm", "P_return", "dBm"),
            ("p_observed_dbm", "P_observed (high)", "dBm"),
        ]
        for key, label, unit in labels:
            if key in summary:
                value = summary[key]
                text = f"{value:+.1f}" if key == "eirp_dbm" else f"{value:.1f}"
                table.add_row(label, f"{text} {unit}")
        console.print(table)
        return EXIT_OK

    def cmd_ber(self, delta_ps: List[float], sigma: float, trials: int, seed: int,
                output: Optional[Path]) -> int:
        rows = []
        for i, delta_p in enumerate(delta_ps):
            ber = ber_estimate(delta_p, sigma, trials, seed + i)
            rows.append({
                "delta_p": delta_p,
                "ber": ber,
                "stderr": ber_standard_error(ber, trials),
                "theory": theoretical_ber(delta_p, sigma),
            })
        return self._emit_rows(rows, output, ["delta_p", "ber", "stderr", "theory"])

    def cmd_sweep(self, scenario_path: str, carriers: List[float], workers: Optional[int],
                  output: Optional[Path]) -> int:
        try:
            scenario = load_scenario(scenario_path)
        except ScenarioValidationError as e:
            _diagnostic(str(e))
            return EXIT_VALIDATION
        except OSError as e:
            _diagnostic(f"cannot read scenario: {e}")
            return EXIT_IO
        band = scenario.nodes[0].reflection.band if scenario.nodes else (863e6, 870e6)
        outside = [f for f in carriers if not band[0] <= f <= band[1]]
        if outside:
            _diagnostic(f"carrier(s) outside the rectifier band: {', '.join(f'{f:.0f}' for f in outside)}")
            return EXIT_VALIDATION
        rows = sweep_scenario(scenario, carriers, workers)
        return self._emit_rows(rows, output, ["carrier_hz", "seed", "auth_windows", "auth_accepted",
                                              "mean_dynamic_range_db", "ber"])

    def cmd_replay_mc(self, strategies: List[str], epochs: int, seed: int, hop_channels: int) -> int:
        table = Table(title=f"Waveform replay acceptance ({epochs} epochs, seed {seed})")
        table.add_column("Strategy", style="cyan")
        table.add_column("Acceptance", style="green", justify="right")
        for name in strategies:
            rate = estimate_replay_acceptance(Strategy(name), epochs, seed, hop_channels=hop_channels)
            table.add_row(name, f"{rate:.4f}")
        console.print(table)
        return EXIT_OK

    def cmd_presets(self) -> int:
        table = Table(title=f"Scenario presets ({config.get_presets_dir()})")
        table.add_column("Preset", style="cyan")
        table.add_column("Status")
        code = EXIT_OK
        for path in list_presets():
            try:
                load_scenario(path)
                table.add_row(path.stem, "[green]valid[/green]")
            except ScenarioValidationError as e:
                table.add_row(path.stem, f"[red]{len(e.errors)} error(s)[/red]")
                code = EXIT_VALIDATION
        console.print(table)
        return code

    def cmd_history(self, limit: int, scenario_name: Optional[str]) -> int:
        try:
            runs = ArchiveService().list_runs(limit, scenario_name)
        except ArchiveError as e:
            _diagnostic(str(e))
            return EXIT_IO
        if not runs:
            console.print("[yellow]No archived runs[/yellow]")
            return EXIT_OK
        table = Table(title="Archived runs")
        for column in runs[0]:
            table.add_column(column, style="cyan" if column == "scenario" else None)
        for r in runs:
            table.add_row(*(str(v) for v in r.values()))
        console.print(table)
        return EXIT_OK

    def _emit_rows(self, rows, output: Optional[Path], columns: List[str]) -> int:
        if output is None:
            self.file_manager.rows_frame(rows, columns).to_csv(sys.stdout, index=False)
            return EXIT_OK
        try:
            self.file_manager.write_rows_csv(rows, output, columns)
        except OSError as e:
            _diagnostic(f"cannot write {output}: {e}")
            return EXIT_IO
        console.print(f"[green]✓ CSV exported: {output}[/green]")
        return EXIT_OK


# CLI Commands
@click.group()
@click.option('--verbose', '-v', count=True, help='-v for INFO, -vv for DEBUG logging')
@click.pass_context
def main(ctx, verbose):
    """Backscatter SWIPT security simulator"""
    setup_logging(verbose)
    for problem in config.validate_config():
        logger.warning(f"config: {problem}")
    ctx.obj = SimulatorCLI()


@main.command()
@click.option('--scenario', '-s', 'scenario_path', required=True, help='Scenario file or preset name')
@click.option('--seed', type=click.IntRange(0, 2 ** 64 - 1), help='Override the scenario seed')
@click.option('--output', '-o', type=click.Path(path_type=Path), help='Report file (json) or directory (csv)')
@click.option('--format', '-f', 'fmt', type=click.Choice(['json', 'csv']), default=config.DEFAULT_REPORT_FORMAT)
@click.option('--archive', is_flag=True, help='Store the run in the archive database')
@click.pass_context
def run(ctx, scenario_path, seed, output, fmt, archive):
    """Run one scenario and write its report"""
    verbosity = ctx.find_root().params.get('verbose', 0)
    sys.exit(ctx.obj.cmd_run(RunConfig(scenario_path, seed, output, fmt, verbosity, archive)))


@main.command()
@click.argument('scenarios', nargs=-1, required=True)
@click.pass_context
def validate(ctx, scenarios):
    """Parse and validate scenario files without running them"""
    sys.exit(ctx.obj.cmd_validate(list(scenarios)))


@main.command()
@click.option('--p-source', type=float, required=True, help='Source power (dBm)')
@click.option('--isolation', type=click.FloatRange(min=0), required=True, help='Circulator isolation (dB)')
@click.option('--forward-loss', type=click.FloatRange(min=0), default=0.8, show_default=True, help='dB')
@click.option('--s11', type=click.FloatRange(max=0), default=-0.6, show_default=True,
              help='Mismatched-state S11 (dB)')
@click.option('--distance', type=click.FloatRange(min=0, min_open=True), help='CN-to-node distance (m)')
@click.option('--freq', type=click.FloatRange(min=0, min_open=True), default=DEFAULT_CARRIER_HZ,
              show_default=True, help='Carrier (Hz)')
@click.option('--tx-gain', type=float, default=0.0, help='CN antenna gain (dBi)')
@click.option('--node-gain', type=float, default=0.0, help='Node antenna gain (dBi)')
@click.pass_context
def linkbudget(ctx, p_source, isolation, forward_loss, s11, distance, freq, tx_gain, node_gain):
    """Quick link-budget table"""
    try:
        code = ctx.obj.cmd_linkbudget(p_source, isolation, forward_loss, s11, distance, freq, tx_gain, node_gain)
    except LinkBudgetError as e:
        raise click.UsageError(str(e))
    sys.exit(code)


@main.command()
@click.option('--delta-p', 'delta_p', required=True, help='ΔP values: "a,b,c" or "start:stop:step" (dB)')
@click.option('--sigma', type=click.FloatRange(min=0), default=0.5, show_default=True, help='Noise sigma (dB)')
@click.option('--trials', type=click.IntRange(min=1), default=100_000, show_default=True,
              help='Bits per ΔP point')
@click.option('--seed', type=click.IntRange(min=0), default=0, show_default=True)
@click.option('--output', '-o', type=click.Path(path_type=Path), help='CSV file (default: stdout)')
@click.pass_context
def ber(ctx, delta_p, sigma, trials, seed, output):
    """Monte Carlo BER sweep over ΔP"""
    sys.exit(ctx.obj.cmd_ber(_parse_values(delta_p), sigma, trials, seed, output))


@main.command()
@click.option('--scenario', '-s', 'scenario_path', required=True, help='Scenario file or preset name')
@click.option('--carriers', required=True, help='Carriers in Hz: "a,b,c" or "start:stop:step"')
@click.option('--workers', type=click.IntRange(min=1), help='Parallel worker processes')
@click.option('--output', '-o', type=click.Path(path_type=Path), help='CSV file (default: stdout)')
@click.pass_context
def sweep(ctx, scenario_path, carriers, workers, output):
    """Run one scenario across carrier frequencies"""
    sys.exit(ctx.obj.cmd_sweep(scenario_path, _parse_values(carriers), workers, output))


@main.command('replay-mc')
@click.option('--strategy', 'strategies', multiple=True, type=click.Choice([s.value for s in Strategy]),
              help='Strategies to evaluate (default: all)')
@click.option('--epochs', type=click.IntRange(min=1), default=10_000, show_default=True)
@click.option('--seed', type=click.IntRange(min=0), default=0, show_default=True)
@click.option('--hop-channels', type=click.IntRange(min=1), default=8, show_default=True)
@click.pass_context
def replay_mc(ctx, strategies, epochs, seed, hop_channels):
    """Monte Carlo acceptance of a stale waveform replayer per strategy"""
    names = list(strategies) or [s.value for s in Strategy]
    sys.exit(ctx.obj.cmd_replay_mc(names, epochs, seed, hop_channels))


@main.command()
@click.pass_context
def presets(ctx):
    """List shipped scenario presets and whether they validate"""
    sys.exit(ctx.obj.cmd_presets())


@main.command()
@click.option('--limit', type=click.IntRange(min=1), default=20, show_default=True)
@click.option('--scenario', 'scenario_name', help='Only runs of this scenario')
@click.pass_context
def history(ctx, limit, scenario_name):
    """List archived runs"""
    sys.exit(ctx.obj.cmd_history(limit, scenario_name))


if __name__ == "__main__":
    main()
