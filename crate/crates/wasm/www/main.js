import init, { decompositionTable, ellipticity, qholoCheck } from "./pkg/qdc_wasm.js";

const $ = (id) => document.getElementById(id);

function table(headers, rows, badCell) {
  const t = document.createElement("table");
  t.insertRow().append(...headers.map((h) => Object.assign(document.createElement("th"), { textContent: h })));
  for (const row of rows) {
    const tr = t.insertRow();
    row.forEach((v, i) => {
      const td = tr.insertCell();
      td.textContent = String(v);
      if (badCell && badCell(row, i)) td.className = "bad";
    });
  }
  return t;
}

function run(outId, f) {
  const out = $(outId);
  out.replaceChildren();
  try {
    f(out);
  } catch (e) {
    out.append(Object.assign(document.createElement("p"), { className: "error", textContent: e.message ?? String(e) }));
  }
}

function status(ok, yes, no) {
  return Object.assign(document.createElement("p"), { className: ok ? "ok" : "error", textContent: ok ? yes : no });
}

await init();

$("table-run").onclick = () =>
  run("table-out", (out) => {
    const { rows } = JSON.parse(decompositionTable(Number($("table-n").value)));
    out.append(table(["k", "r", "ε", "dim"], rows.map((r) => [r.k, r.r, r.epsilon, r.dim])));
  });

$("ell-run").onclick = () =>
  run("ell-out", (out) => {
    const rep = JSON.parse(ellipticity(Number($("ell-n").value), $("ell-xi").value));
    out.append(status(rep.all_match, "every node matches the predicted verdict", "mismatch with the predicted verdict"));
    out.append(
      table(
        ["k0", "k", "r", "dim", "rank in", "rank out", "exact", "predicted"],
        rep.rows.map((r) => [r.k0, r.k, r.r, r.dim, r.rank_in, r.rank_out, r.exact, r.predicted]),
        (row) => row[6] !== row[7],
      ),
    );
  });

$("qh-run").onclick = () =>
  run("qh-out", (out) => {
    const rep = JSON.parse(qholoCheck($("qh-in").value));
    out.append(status(rep.q_holomorphic, "q-holomorphic", "not q-holomorphic; residual below"));
    if (!rep.q_holomorphic) {
      out.append(Object.assign(document.createElement("pre"), { textContent: JSON.stringify(rep.residual, null, 2) }));
    }
  });

$("table-run").click();
