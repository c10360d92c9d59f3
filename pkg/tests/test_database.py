import math

from app.db.database import CheckRecord, SuiteRun, get_db, get_run_history, init_db, save_run
from app.schemas import CheckResult
from app.utils.formatters import format_run_history


def make_result(check_id: str, lhs: complex, rhs: complex, **params) -> CheckResult:
    return CheckResult.compare(check_id, "Eq. (9.9)", {"q": 0.5, **params}, lhs, rhs, 1e-8)


class TestHistory:
    def test_save_and_read_back(self):
        init_db()
        rows = [make_result("A_1", 1.0, 1.0), make_result("A_1", 1.0, 2.0, t=0.1)]
        with get_db() as db:
            run = save_run(db, "check:A_1", [0.5], rows)
            run_id = run.id

        with get_db() as db:
            stored = db.get(SuiteRun, run_id)
            assert stored.total == 2
            assert stored.failed == 1
            assert stored.q_grid == [0.5]
            records = sorted(stored.records, key=lambda r: r.id)
            assert [r.passed for r in records] == [True, False]
            assert records[1].params == {"q": 0.5, "t": 0.1}

    def test_non_finite_values_are_null(self):
        init_db()
        with get_db() as db:
            save_run(db, "all", [0.5], [make_result("B_2", math.inf, 1.0)])
        with get_db() as db:
            record = db.query(CheckRecord).one()
            assert record.lhs_re is None
            assert record.rhs_re == 1.0
            assert record.passed is False

    def test_history_newest_first(self):
        init_db()
        for selector in ("section:2", "section:3", "section:5"):
            with get_db() as db:
                save_run(db, selector, [0.3, 0.8], [make_result("C_3", 1.0, 1.0)])
        with get_db() as db:
            runs = format_run_history(get_run_history(db, limit=2))
        assert [run["selector"] for run in runs] == ["section:5", "section:3"]
        assert runs[0]["q_grid"] == [0.3, 0.8]

    def test_rollback_on_error(self):
        init_db()
        try:
            with get_db() as db:
                save_run(db, "all", [0.5], [make_result("D_4", 1.0, 1.0)])
                raise RuntimeError("falha no meio")
        except RuntimeError:
            pass
        with get_db() as db:
            assert get_run_history(db) == []
