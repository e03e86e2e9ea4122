"""Golden CLI invocations shared by the CLI tests and the acceptance suite."""

from __future__ import annotations

from pathlib import Path

GOLDEN = Path(__file__).parent / "golden"

# name -> argv; each writes tests/golden/<name>.out
CASES = {
    "groth_naturals": ["groth", "--monoid", "generators: a"],
    "groth_idempotent": ["groth", "--monoid", "generators: a; relations: a+a = a"],
    "groth_table": ["groth", "--table", '{"table": [[0, 1], [1, 1]], "zero": 0, "names": ["0", "inf"]}', "--element", "inf"],
    "groth_table_json": ["--json", "groth", "--table", '{"table": [[0,1,2],[1,2,0],[2,0,1]], "zero": 0}'],
    "k0_sqrt5": ["k0", "--ring", "Z(sqrt-5)", "--reduced"],
    "k0_cg": ["k0", "--ring", "C[G]", "--N", "3", "--json"],
    "k0_morita_symbolic": ["k0", "--ring", "M_n", "--n", "2"],
    "k0_bounded": ["k0", "--ring", "bounded"],
    "k0_idempotent": ["k0", "--field", "F_5", "--matrix", "[[1,0],[0,0]]"],
    "k0_morita": ["k0", "--matrix", "[[[[1,0],[0,1]]]]", "--morita", "2"],
    "k0_unitalize": ["k0", "--unitalize", "2,3", "5,7"],
    "k1_swap": ["k1", "--field", "Q", "--matrix", "[[0,1],[1,0]]"],
    "k1_euclid_json": ["k1", "--field", "Z", "--matrix", "[[2,1],[1,1]]", "--json"],
    "k1_table": ["k1", "--ring", "C[G]", "--N", "4"],
    "k1_cyclotomic": ["k1", "--cyclotomic", "7", "--ascii"],
    "k1_circle": ["k1", "--circle"],
    "k1_loop": ["k1", "--loop", "x^3 - x"],
    "k1_f9": ["k1", "--field", "F_9"],
    "clutch_k0": ["clutch", "--p", "2", "--n", "1", "--f", "z^k", "--k", "0", "--grid", "32"],
    "clutch_k3_json": ["clutch", "--k", "3", "--json"],
    "clutch_diag": ["clutch", "--n", "2", "--f", "diag", "--powers", "1,2", "--grid", "48"],
    "clutch_cosine": ["clutch", "--k", "-2", "--partition", "cosine"],
    "clutch_s1": ["clutch", "--p", "1", "--f", "identity", "--n", "2", "--grid", "16"],
    "winding_z3": ["winding", "--k", "3"],
    "winding_conj": ["winding", "--f", "conj", "--json"],
    "rho_7": ["rho", "7"],
    "rho_powers": ["rho", "2", "4", "8", "16"],
    "loopchain_all": ["loopchain"],
    "loopchain_eight": ["loopchain", "Z×BGL(R)", "--steps", "8", "--json"],
    "pigl_table": ["pigl", "--max-p", "5"],
    "kfq_15": ["kfq", "--q", "4", "--index", "3"],
    "kfq_i_form": ["kfq", "--q", "5", "--i", "1", "--parity", "even"],
    "kfq_units": ["kfq", "--q", "9", "--units", "--json"],
    "kfq_mod_n": ["kfq", "--q", "7", "--mod-n", "3"],
    "k2_symbols_7": ["k2-symbols", "--q", "7", "--show-relations"],
    "kcoeff_12": ["kcoeff", "--ki", "Z", "--kim1", "0", "--n", "12"],
    "kcoeff_extension": ["kcoeff", "--ki", "Z/4", "--kim1", "Z/2", "--n", "2", "--json"],
    "kcoeff_suslin": ["kcoeff", "--suslin-index", "4", "--n", "5"],
    "bernoulli_6": ["bernoulli", "--max-k", "6"],
    "bernoulli_json": ["bernoulli", "--k", "6", "--json"],
    "kz_23": ["kz-table", "--from", "23", "--to", "23"],
    "kz_0_30": ["kz-table"],
    "kz_json": ["kz-table", "--from", "0", "--to", "3", "--json"],
    "k2q_13": ["k2q", "--bound", "13"],
    "pseudoisotopy": ["pseudoisotopy"],
    "err_groth_both": ["groth", "--monoid", "generators: a", "--table", "{}"],
    "err_k0_verify": ["k0", "--matrix", "[[1,1],[0,1]]"],
    "err_k0_verify_json": ["--json", "k0", "--matrix", "[[1,1],[0,1]]"],
    "err_kfq": ["kfq", "--q", "6", "--index", "1", "--json"],
    "err_bernoulli_guard": ["bernoulli", "--k", "500"],
    "err_clutch_tol": ["clutch", "--k", "1", "--tol", "1e-30", "--json"],
}

EXIT = {"err_groth_both": 2, "err_k0_verify": 3, "err_k0_verify_json": 3, "err_kfq": 2, "err_bernoulli_guard": 2, "err_clutch_tol": 3}



def render(code: int, out: str, err: str) -> str:
    return f"$ exit {code}\n{out}" + (f"--- stderr\n{err}" if err else "")
