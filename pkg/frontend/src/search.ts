/** Analysis search panel: out-of-context analyses per dialect plus prior
 * human annotations of the same word. Picking any result fills the whole
 * morphology panel in one action. */

import { ApiClient } from "./api.js";
import { MorphPanel } from "./morphpanel.js";
import type { AnalysisView, AnnotationView, SearchResults } from "./types.js";

export class SearchPanel {
  surface = "";
  dialect = "GLF";
  providerAnalyses: AnalysisView[] = [];
  priorAnnotations: AnnotationView[] = [];
  searched = false;
  error: string | null = null;

  constructor(private api: ApiClient) {}

  /** Explicit empty state ("no analyses") vs. not-yet-searched. */
  get empty(): boolean {
    return (
      this.searched &&
      this.providerAnalyses.length === 0 &&
      this.priorAnnotations.length === 0
    );
  }

  async run(surface?: string, dialect?: string): Promise<SearchResults | null> {
    if (surface !== undefined) this.surface = surface;
    if (dialect !== undefined) this.dialect = dialect;
    if (!this.surface) {
      this.error = "enter a word to search";
      return null;
    }
    try {
      const results = await this.api.searchAnalyses(this.surface, this.dialect);
      this.providerAnalyses = results.provider_analyses;
      this.priorAnnotations = results.prior_annotations;
      this.searched = true;
      this.error = null;
      return results;
    } catch (error) {
      this.error = error instanceof Error ? error.message : String(error);
      return null;
    }
  }

  async setDialect(dialect: string): Promise<void> {
    this.dialect = dialect;
    if (this.searched) await this.run();
  }

  /** One click: every morphology field (segments, POS, features, lemma,
   * gloss) lands in the panel together. */
  pickAnalysis(panel: MorphPanel, analysis: AnalysisView): void {
    panel.fillFromAnalysis(analysis);
  }

  pickPrior(panel: MorphPanel, annotation: AnnotationView): void {
    panel.fillFromAnalysis({
      annotation,
      dialect: this.dialect,
      score: 1.0,
      provider: "prior",
    });
  }
}
