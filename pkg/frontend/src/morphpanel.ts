/** Morphology panel state: the editable draft of one token's annotation
 * (proclitics, baseword, enclitics, lemma, gloss).
 *
 * fillFromAnnotation / fillFromAnalysis populate every field in a single
 * action; that is what makes the analysis-search workflow fast. */

import type { AnalysisView, AnnotationView, SegmentView } from "./types.js";

export type SegmentSlot = "proclitic" | "baseword" | "enclitic";

function cloneSegment(segment: SegmentView): SegmentView {
  return {
    surface: segment.surface,
    pos: segment.pos,
    features: { ...segment.features },
  };
}

function emptySegment(surface = ""): SegmentView {
  return { surface, pos: "", features: {} };
}

export class MorphPanel {
  tokenId: string | null = null;
  tokenSurface = "";
  proclitics: SegmentView[] = [];
  baseword: SegmentView = emptySegment();
  enclitics: SegmentView[] = [];
  lemma = "";
  gloss = "";
  dirty = false;

  get open(): boolean {
    return this.tokenId !== null;
  }

  /** Open the panel for a token with no usable annotation. */
  openBlank(tokenId: string, surface: string): void {
    this.tokenId = tokenId;
    this.tokenSurface = surface;
    this.proclitics = [];
    this.baseword = emptySegment(surface);
    this.enclitics = [];
    this.lemma = surface;
    this.gloss = "";
    this.dirty = false;
  }

  /** Populate every field at once from a stored annotation. */
  fillFromAnnotation(tokenId: string, surface: string, annotation: AnnotationView): void {
    this.tokenId = tokenId;
    this.tokenSurface = surface;
    this.proclitics = annotation.proclitics.map(cloneSegment);
    this.baseword = cloneSegment(annotation.baseword);
    this.enclitics = annotation.enclitics.map(cloneSegment);
    this.lemma = annotation.lemma;
    this.gloss = annotation.gloss;
    this.dirty = false;
  }

  /** Populate every field at once from a search result or suggestion,
   * keeping the panel on its current token. */
  fillFromAnalysis(analysis: AnalysisView): void {
    if (this.tokenId === null) return;
    const annotation = analysis.annotation;
    this.proclitics = annotation.proclitics.map(cloneSegment);
    this.baseword = cloneSegment(annotation.baseword);
    this.enclitics = annotation.enclitics.map(cloneSegment);
    this.lemma = annotation.lemma;
    this.gloss = annotation.gloss;
    this.dirty = true;
  }

  segment(slot: SegmentSlot, index: number): SegmentView {
    if (slot === "proclitic") return this.proclitics[index];
    if (slot === "enclitic") return this.enclitics[index];
    return this.baseword;
  }

  addSegment(slot: Exclude<SegmentSlot, "baseword">): void {
    const list = slot === "proclitic" ? this.proclitics : this.enclitics;
    list.push(emptySegment());
    this.dirty = true;
  }

  removeSegment(slot: Exclude<SegmentSlot, "baseword">, index: number): void {
    const list = slot === "proclitic" ? this.proclitics : this.enclitics;
    list.splice(index, 1);
    this.dirty = true;
  }

  setSurface(slot: SegmentSlot, index: number, surface: string): void {
    this.segment(slot, index).surface = surface;
    this.dirty = true;
  }

  setPos(slot: SegmentSlot, index: number, pos: string): void {
    this.segment(slot, index).pos = pos;
    this.dirty = true;
  }

  setFeature(slot: SegmentSlot, index: number, key: string, value: string): void {
    const segment = this.segment(slot, index);
    if (value === "") {
      delete segment.features[key];
    } else {
      segment.features[key] = value;
    }
    this.dirty = true;
  }

  setLemma(lemma: string): void {
    this.lemma = lemma;
    this.dirty = true;
  }

  setGloss(gloss: string): void {
    this.gloss = gloss;
    this.dirty = true;
  }

  toAnnotation(): AnnotationView {
    return {
      proclitics: this.proclitics.map(cloneSegment),
      baseword: cloneSegment(this.baseword),
      enclitics: this.enclitics.map(cloneSegment),
      lemma: this.lemma,
      gloss: this.gloss,
      source: "human",
    };
  }

  /** Current field values, for tests and for rendering summaries. */
  snapshot(): { segments: SegmentView[]; lemma: string; gloss: string } {
    return {
      segments: [
        ...this.proclitics.map(cloneSegment),
        cloneSegment(this.baseword),
        ...this.enclitics.map(cloneSegment),
      ],
      lemma: this.lemma,
      gloss: this.gloss,
    };
  }

  close(): void {
    this.tokenId = null;
    this.tokenSurface = "";
    this.dirty = false;
  }
}
