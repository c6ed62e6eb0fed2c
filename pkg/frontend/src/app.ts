import { AnnotationApi } from "./api.js";
import { verdictForKey } from "./keyboard.js";
import { AnnotationSession, type SessionState } from "./session.js";
import type { Verdict } from "./types.js";

/**
 * DOM glue. One item on screen at a time: the rewritten claim, its gold
 * evidence panels, the fixed three-step decision checklist, and the
 * verdict controls. The technique name is never shown while annotating;
 * per-technique counts appear only on the completion screen.
 */

const DECISION_STEPS: Array<[string, string]> = [
  ["Core Fact Identification", "Isolate the central factual assertion the claim makes."],
  ["Evidence Verification", "Check whether the evidence explicitly supports or refutes it."],
  ["Ambiguity Resolution", "If it cannot be verified from the evidence alone, answer NEI."],
];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderChecklist(): HTMLElement {
  const panel = el("aside", "checklist");
  panel.appendChild(el("h2", undefined, "Decision procedure"));
  const list = el("ol");
  for (const [title, hint] of DECISION_STEPS) {
    const li = el("li");
    li.appendChild(el("strong", undefined, title));
    li.appendChild(el("p", "hint", hint));
    list.appendChild(li);
  }
  panel.appendChild(list);
  return panel;
}

export function render(state: SessionState, root: HTMLElement, submit: (v: Verdict) => void): void {
  root.replaceChildren();

  if (state.banner) {
    root.appendChild(el("div", "banner", state.banner));
  }

  if (state.progress) {
    const bar = el("div", "progress");
    const fill = el("div", "progress-fill");
    const percent =
      state.progress.total > 0 ? (100 * state.progress.done) / state.progress.total : 0;
    fill.style.width = `${percent}%`;
    bar.appendChild(fill);
    root.appendChild(bar);
    root.appendChild(
      el("p", "progress-label", `${state.progress.done} / ${state.progress.total} annotated`),
    );
  }

  if (state.phase === "done") {
    const done = el("section", "completion");
    done.appendChild(el("h1", undefined, "All items annotated"));
    if (state.progress) {
      const table = el("table", "technique-counts");
      const header = el("tr");
      header.appendChild(el("th", undefined, "technique"));
      header.appendChild(el("th", undefined, "annotated"));
      table.appendChild(header);
      for (const [technique, counts] of Object.entries(state.progress.per_technique).sort()) {
        const row = el("tr");
        row.appendChild(el("td", undefined, technique));
        row.appendChild(el("td", undefined, `${counts.done} / ${counts.total}`));
        table.appendChild(row);
      }
      done.appendChild(table);
    }
    root.appendChild(done);
    return;
  }

  if (state.phase === "error") {
    root.appendChild(el("div", "banner blocking", state.banner ?? "service unreachable"));
    return;
  }

  if (!state.item || state.item.item_id === null) {
    root.appendChild(el("p", "loading", "loading item..."));
    return;
  }

  const main = el("main", "item");
  const claim = el("section", "claim");
  claim.appendChild(el("h1", undefined, "Claim"));
  claim.appendChild(el("blockquote", "claim-text", state.item.text ?? ""));
  main.appendChild(claim);

  const evidence = el("section", "evidence");
  evidence.appendChild(el("h2", undefined, "Evidence"));
  for (const snippet of state.item.evidence ?? []) {
    evidence.appendChild(el("div", "evidence-panel", snippet));
  }
  main.appendChild(evidence);
  main.appendChild(renderChecklist());

  const controls = el("section", "controls");
  const busy = state.phase !== "annotating";
  for (const [verdict, label, key] of [
    ["True", "True", "T"],
    ["False", "False", "F"],
    ["NEI", "Not enough info", "N"],
  ] as Array<[Verdict, string, string]>) {
    const button = el("button", `verdict verdict-${verdict.toLowerCase()}`);
    button.textContent = `${label} (${key})`;
    button.disabled = busy;
    button.addEventListener("click", () => submit(verdict));
    controls.appendChild(button);
  }
  if (busy) {
    controls.appendChild(el("span", "status", state.phase));
  }
  main.appendChild(controls);
  root.appendChild(main);
}

export function mount(root: HTMLElement, baseUrl = ""): AnnotationSession {
  const api = new AnnotationApi(baseUrl);
  const session = new AnnotationSession(api);
  const submit = (verdict: Verdict) => void session.submit(verdict);
  session.subscribe((state) => render(state, root, submit));
  document.addEventListener("keydown", (event) => {
    if (event.target instanceof HTMLInputElement || event.target instanceof HTMLTextAreaElement) {
      return;
    }
    const verdict = verdictForKey(event.key);
    if (verdict !== null) {
      event.preventDefault();
      submit(verdict);
    }
  });
  void session.start();
  return session;
}

declare global {
  interface Window {
    annotationSession?: AnnotationSession;
  }
}

const rootElement = typeof document !== "undefined" ? document.getElementById("app") : null;
if (rootElement) {
  window.annotationSession = mount(rootElement);
}
