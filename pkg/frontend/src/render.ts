/** DOM rendering for the workbench and dashboard. Arabic token strips are
 * right-to-left; lemma and gloss inputs stay left-to-right. Every control
 * mirrors an API precondition: anything the service would reject is
 * disabled or absent here. */

import { Dashboard } from "./dashboard.js";
import { MorphPanel } from "./morphpanel.js";
import { SearchPanel } from "./search.js";
import { EDIT_AFFORDANCES, Workbench } from "./workbench.js";
import type { SentenceView, TagSetView, TokenView } from "./types.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  if (text !== undefined) node.textContent = text;
  return node;
}

export function clear(container: HTMLElement): void {
  while (container.firstChild) container.removeChild(container.firstChild);
}

/** Style classes for one token chip. Edited tokens (any provenance other
 * than raw) carry the distinct `edited` class for color-coding. */
export function tokenClassName(token: TokenView, selectedId: string | null): string {
  const classes = ["token"];
  if (token.provenance !== "raw") classes.push("edited");
  if (token.annotation && token.annotation.source !== "suggested") {
    classes.push("annotated");
  }
  if (token.stale) classes.push("stale");
  if (token.id === selectedId) classes.push("selected");
  return classes.join(" ");
}

export function renderTokenStrip(
  container: HTMLElement,
  workbench: Workbench,
  sentence: SentenceView,
  onChange: () => void,
): void {
  clear(container);
  const strip = el("div", { class: "token-strip", dir: "rtl", "data-sentence": sentence.id });
  for (const token of sentence.tokens) {
    const chip = el(
      "button",
      {
        class: tokenClassName(token, workbench.selectedTokenId),
        "data-token-id": token.id,
        title: token.provenance,
      },
      workbench.displaySurface(token),
    );
    chip.addEventListener("click", () => {
      workbench.selectToken(token.id);
      onChange();
    });
    strip.appendChild(chip);
  }
  container.appendChild(strip);
  if (workbench.showRaw) {
    const raw = el("div", { class: "raw-text", dir: "rtl" }, sentence.raw_text);
    container.appendChild(raw);
  }
}

/** The edit toolbar exposes exactly the five allowed affordances. */
export function renderEditToolbar(
  container: HTMLElement,
  workbench: Workbench,
  sentence: SentenceView,
  onChange: () => void,
): void {
  clear(container);
  const bar = el("div", { class: "edit-toolbar", "data-sentence": sentence.id });
  for (const gesture of EDIT_AFFORDANCES) {
    const button = el("button", { class: "gesture", "data-gesture": gesture }, gesture);
    if (gesture === "undo" && !workbench.canUndo(sentence.id)) {
      button.setAttribute("disabled", "");
    }
    if (gesture === "redo" && !workbench.canRedo(sentence.id)) {
      button.setAttribute("disabled", "");
    }
    if (
      (gesture === "modify" || gesture === "split") &&
      workbench.selectedTokenId === null
    ) {
      button.setAttribute("disabled", "");
    }
    button.addEventListener("click", async () => {
      const selected = workbench.selectedTokenId;
      if (gesture === "undo") await workbench.undo(sentence.id);
      else if (gesture === "redo") await workbench.redo(sentence.id);
      else if (gesture === "modify" && selected) {
        const token = workbench.tokenById(selected);
        const input = window.prompt("New surface", token?.surface ?? "");
        if (input !== null) await workbench.commitModify(selected, input);
      } else if (gesture === "split" && selected) {
        const input = window.prompt("Split into (space-separated parts)");
        if (input !== null) {
          await workbench.splitToken(selected, input.split(/\s+/).filter(Boolean));
        }
      } else if (gesture === "merge" && selected) {
        const token = workbench.tokenById(selected);
        const next = sentence.tokens[(token?.position ?? 0) + 1];
        if (next) await workbench.mergeTokens([selected, next.id]);
      }
      onChange();
    });
    bar.appendChild(button);
  }
  container.appendChild(bar);
}

export function renderMorphPanel(
  container: HTMLElement,
  panel: MorphPanel,
  tagset: TagSetView | null,
  workbench: Workbench,
  onChange: () => void,
): void {
  clear(container);
  if (!panel.open) {
    container.appendChild(el("p", { class: "hint" }, "Select a token to annotate."));
    return;
  }
  const root = el("div", { class: "morph-panel" });
  root.appendChild(el("h3", { dir: "rtl" }, panel.tokenSurface));

  const slots: Array<["proclitic" | "baseword" | "enclitic", string, number]> = [];
  panel.proclitics.forEach((_, i) => slots.push(["proclitic", `proclitic ${i + 1}`, i]));
  slots.push(["baseword", "baseword", 0]);
  panel.enclitics.forEach((_, i) => slots.push(["enclitic", `enclitic ${i + 1}`, i]));

  for (const [slot, label, index] of slots) {
    const segment = panel.segment(slot, index);
    const row = el("div", { class: "segment-row", "data-slot": slot });
    row.appendChild(el("span", { class: "slot-label" }, label));
    const surface = el("input", {
      class: "segment-surface",
      dir: "rtl",
      value: segment.surface,
    });
    surface.value = segment.surface;
    surface.addEventListener("input", () => panel.setSurface(slot, index, surface.value));
    row.appendChild(surface);
    const pos = el("select", { class: "segment-pos" });
    pos.appendChild(el("option", { value: "" }, "(tag)"));
    for (const tag of tagset?.tags ?? []) {
      const option = el("option", { value: tag }, tag);
      if (tag === segment.pos) option.setAttribute("selected", "");
      pos.appendChild(option);
    }
    pos.value = segment.pos;
    pos.addEventListener("change", () => {
      panel.setPos(slot, index, pos.value);
      onChange();
    });
    row.appendChild(pos);
    for (const key of tagset?.features_per_tag[segment.pos] ?? []) {
      const feature = el("select", { class: "segment-feature", "data-feature": key });
      feature.appendChild(el("option", { value: "" }, key));
      for (const value of tagset?.feature_values[key] ?? []) {
        const option = el("option", { value }, value);
        if (segment.features[key] === value) option.setAttribute("selected", "");
        feature.appendChild(option);
      }
      feature.value = segment.features[key] ?? "";
      feature.addEventListener("change", () =>
        panel.setFeature(slot, index, key, feature.value),
      );
      row.appendChild(feature);
    }
    if (slot !== "baseword") {
      const remove = el("button", { class: "remove-segment" }, "x");
      remove.addEventListener("click", () => {
        panel.removeSegment(slot, index);
        onChange();
      });
      row.appendChild(remove);
    }
    root.appendChild(row);
  }

  const addProclitic = el("button", { class: "add-proclitic" }, "+ proclitic");
  addProclitic.addEventListener("click", () => {
    panel.addSegment("proclitic");
    onChange();
  });
  const addEnclitic = el("button", { class: "add-enclitic" }, "+ enclitic");
  addEnclitic.addEventListener("click", () => {
    panel.addSegment("enclitic");
    onChange();
  });
  root.append(addProclitic, addEnclitic);

  // lemma and gloss are left-to-right fields
  const lemma = el("input", { class: "lemma", dir: "ltr", placeholder: "lemma" });
  lemma.value = panel.lemma;
  lemma.addEventListener("input", () => panel.setLemma(lemma.value));
  const gloss = el("input", { class: "gloss", dir: "ltr", placeholder: "gloss (English)" });
  gloss.value = panel.gloss;
  gloss.addEventListener("input", () => panel.setGloss(gloss.value));
  root.append(lemma, gloss);

  const save = el("button", { class: "save-annotation" }, "Save");
  save.addEventListener("click", async () => {
    await workbench.saveAnnotation();
    onChange();
  });
  root.appendChild(save);

  const matches = workbench.bulkMatchCount(panel.tokenSurface);
  const bulk = el(
    "button",
    { class: "bulk-apply" },
    `Apply to all ${matches} matching tokens`,
  );
  if (matches === 0) bulk.setAttribute("disabled", "");
  bulk.addEventListener("click", async () => {
    await workbench.bulkApply();
    onChange();
  });
  root.appendChild(bulk);

  container.appendChild(root);
}

/** Version-conflict prompt. Offers reload; never discards the draft. */
export function renderConflictPrompt(
  container: HTMLElement,
  workbench: Workbench,
  onChange: () => void,
): void {
  clear(container);
  if (!workbench.conflict) return;
  const box = el("div", { class: "conflict-prompt", role: "alertdialog" });
  box.appendChild(el("p", {}, workbench.conflict.message));
  const reload = el("button", { class: "reload" }, "Reload document");
  reload.addEventListener("click", async () => {
    await workbench.reload();
    onChange();
  });
  box.appendChild(reload);
  container.appendChild(box);
}

export function renderSearchPanel(
  container: HTMLElement,
  search: SearchPanel,
  panel: MorphPanel,
  onChange: () => void,
): void {
  clear(container);
  const root = el("div", { class: "search-panel" });
  const input = el("input", { class: "search-surface", dir: "rtl", placeholder: "word" });
  input.value = search.surface;
  input.addEventListener("input", () => (search.surface = input.value));
  const dialect = el("select", { class: "search-dialect" });
  for (const label of ["GLF", "MSA", "EGY", "LEV"]) {
    const option = el("option", { value: label }, label);
    if (label === search.dialect) option.setAttribute("selected", "");
    dialect.appendChild(option);
  }
  dialect.value = search.dialect;
  dialect.addEventListener("change", async () => {
    await search.setDialect(dialect.value);
    onChange();
  });
  const go = el("button", { class: "search-go" }, "Search");
  go.addEventListener("click", async () => {
    await search.run();
    onChange();
  });
  root.append(input, dialect, go);

  if (search.empty) {
    root.appendChild(el("p", { class: "no-analyses" }, "No analyses found."));
  }
  const results = el("div", { class: "search-results" });
  search.providerAnalyses.forEach((analysis, i) => {
    const segs = [
      ...analysis.annotation.proclitics,
      analysis.annotation.baseword,
      ...analysis.annotation.enclitics,
    ];
    const item = el(
      "button",
      { class: "search-result provider", "data-index": String(i) },
      `${segs.map((s) => s.surface).join("+")} / ${analysis.annotation.baseword.pos}` +
        ` / ${analysis.annotation.lemma} / ${analysis.annotation.gloss}`,
    );
    item.addEventListener("click", () => {
      search.pickAnalysis(panel, analysis);
      onChange();
    });
    results.appendChild(item);
  });
  search.priorAnnotations.forEach((annotation, i) => {
    const item = el(
      "button",
      { class: "search-result prior", "data-index": String(i) },
      `${annotation.baseword.surface} / ${annotation.baseword.pos} / ${annotation.lemma}`,
    );
    item.addEventListener("click", () => {
      search.pickPrior(panel, annotation);
      onChange();
    });
    results.appendChild(item);
  });
  root.appendChild(results);
  container.appendChild(root);
}

export function renderProgressChart(container: HTMLElement, dashboard: Dashboard): void {
  clear(container);
  const chart = el("div", { class: "progress-chart" });
  for (const bar of dashboard.progressBars()) {
    const row = el("div", { class: "progress-row" });
    row.appendChild(el("span", { class: "progress-label" }, bar.label));
    const track = el("div", { class: "progress-track" });
    const fill = el("div", { class: "progress-fill" });
    fill.style.width = `${Math.round(bar.fraction * 100)}%`;
    track.appendChild(fill);
    row.appendChild(track);
    row.appendChild(el("span", { class: "progress-detail" }, bar.detail));
    chart.appendChild(row);
  }
  container.appendChild(chart);
}
