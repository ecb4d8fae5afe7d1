/** Wire types mirroring the service's JSON views. */

export interface SegmentView {
  surface: string;
  pos: string;
  features: Record<string, string>;
}

export interface AnnotationView {
  proclitics: SegmentView[];
  baseword: SegmentView;
  enclitics: SegmentView[];
  lemma: string;
  gloss: string;
  source: string;
}

export interface AnalysisView {
  annotation: AnnotationView;
  dialect: string;
  score: number;
  provider: string;
}

export interface TokenView {
  id: string;
  surface: string;
  position: number;
  provenance: string;
  annotation: AnnotationView | null;
  stale: boolean;
  suggestions: AnalysisView[];
}

export interface RawTokenView {
  id: string;
  surface: string;
  position: number;
}

export interface SentenceView {
  id: string;
  text: string;
  raw_text: string;
  raw_tokens: RawTokenView[];
  can_undo: boolean;
  can_redo: boolean;
  tokens: TokenView[];
}

export interface DocumentView {
  id: string;
  title: string;
  dialect: string;
  status: string;
  assignee: string | null;
  version: number;
  review_note: string | null;
  tagset: string;
  sentences?: SentenceView[];
}

export interface DocumentRow {
  id: string;
  title: string;
  dialect: string;
  status: string;
  assignee: string | null;
  version: number;
  review_note: string | null;
  tagset: string;
  sentences: number;
}

export interface UserView {
  id: string;
  name: string;
  role: string;
}

export interface TagSetView {
  name: string;
  tags: string[];
  features_per_tag: Record<string, string[]>;
  feature_values: Record<string, string[]>;
}

export interface SearchResults {
  provider_analyses: AnalysisView[];
  prior_annotations: AnnotationView[];
}

export interface ProgressRowView {
  user_id: string | null;
  document_id: string;
  title: string;
  status: string;
  sentences_total: number;
  sentences_edited: number;
  sentences_annotated: number;
  sentences_submitted: number;
  words_total: number;
  words_annotated: number;
  words_per_hour: number | null;
}

export interface IaaReportView {
  aligned_tokens: number;
  unaligned_tokens: number;
  evaluated: number;
  tokenization_agreement: number | null;
  baseword_pos_agreement: number | null;
  lemma_agreement: number | null;
  gloss_agreement: number | null;
  pos_kappa: number | null;
}

export interface SentenceMutation {
  document_version: number;
  status: string;
  sentence: SentenceView;
}

export type EditKind = "modify" | "split" | "merge";
