import type { NextTrial, Report } from "./api.js";
import { RankingState } from "./ranking.js";
import { isEmpty, reportRows } from "./format.js";

export interface TrialHandlers {
  onSubmit(): void;
  onStopEarly(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/**
 * Board screen: clue banner, word grid with click-order ranks, the
 * "no more related words" control, and a submit button that stays
 * disabled until ranks 1 and 2 are set.
 */
export function renderTrial(
  root: HTMLElement,
  next: NextTrial,
  state: RankingState,
  handlers: TrialHandlers,
): void {
  const doc = root.ownerDocument;
  root.replaceChildren();

  const progress = el(
    doc,
    "p",
    "progress",
    `Trial ${next.progress.answered + 1} of ${next.progress.total}`,
  );
  root.appendChild(progress);

  const banner = el(doc, "div", "clue-banner");
  banner.appendChild(el(doc, "span", "clue-label", "Clue:"));
  banner.appendChild(el(doc, "span", "clue-word", next.trial.clue));
  root.appendChild(banner);

  root.appendChild(
    el(
      doc,
      "p",
      "instructions",
      "Click the words most related to the clue, most related first.",
    ),
  );

  const grid = el(doc, "div", "board-grid");
  for (const word of next.trial.words) {
    const cell = el(doc, "button", "word-cell", word);
    cell.dataset.word = word;
    cell.addEventListener("click", () => {
      state.toggle(word);
      renderTrial(root, next, state, handlers);
    });
    const rank = state.rankOf(word);
    if (rank !== null) {
      cell.classList.add("selected");
      cell.appendChild(el(doc, "span", "rank-badge", String(rank)));
    }
    grid.appendChild(cell);
  }
  root.appendChild(grid);

  const controls = el(doc, "div", "controls");

  const stop = el(doc, "button", "stop-early", "No more related words");
  stop.disabled = !state.canStopEarly();
  stop.addEventListener("click", () => {
    if (state.canStopEarly()) handlers.onStopEarly();
  });
  controls.appendChild(stop);

  const submit = el(doc, "button", "submit", "Submit ranking");
  submit.disabled = !state.canSubmit();
  submit.addEventListener("click", () => {
    if (state.canSubmit()) handlers.onSubmit();
  });
  controls.appendChild(submit);

  if (!state.canSubmit()) {
    controls.appendChild(
      el(doc, "p", "hint", "Pick at least two words to continue."),
    );
  }
  root.appendChild(controls);
}

/** Results screen: one table row per configuration, ordered by name. */
export function renderResults(root: HTMLElement, report: Report): void {
  const doc = root.ownerDocument;
  root.replaceChildren();
  root.appendChild(el(doc, "h2", undefined, "Session results"));

  if (isEmpty(report)) {
    root.appendChild(el(doc, "p", "empty-state", "No responses yet."));
    return;
  }

  const table = el(doc, "table", "results");
  const head = doc.createElement("tr");
  for (const title of ["Configuration", "Precision@2", "Recall@4", "Responses"]) {
    head.appendChild(el(doc, "th", undefined, title));
  }
  table.appendChild(head);
  for (const row of reportRows(report)) {
    const tr = doc.createElement("tr");
    tr.appendChild(el(doc, "td", "config-label", row.label));
    tr.appendChild(el(doc, "td", "metric", row.precisionAt2));
    tr.appendChild(el(doc, "td", "metric", row.recallAt4));
    tr.appendChild(el(doc, "td", "count", String(row.n)));
    table.appendChild(tr);
  }
  root.appendChild(table);
}

export function renderError(root: HTMLElement, message: string): void {
  const doc = root.ownerDocument;
  root.replaceChildren();
  root.appendChild(el(doc, "p", "error", message));
}
