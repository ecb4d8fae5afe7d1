/** Annotation workbench state: one open document, token selection by id,
 * the edit gestures, the morphology panel, and conflict handling.
 *
 * Edit mode exposes exactly the gestures the service accepts — modify,
 * split, merge — plus undo and redo. There is deliberately no way to add,
 * delete, or move tokens. Token ids (never positions) key every selection
 * and request, so an undo under the user's feet cannot misdirect actions.
 *
 * Edits update the token strip optimistically and roll back on failure;
 * a 409 version conflict raises a reload prompt and never overwrites the
 * user's pending work silently. */

import { ApiClient, ApiError } from "./api.js";
import { MorphPanel } from "./morphpanel.js";
import type {
  DocumentView,
  EditKind,
  SentenceMutation,
  SentenceView,
  TokenView,
} from "./types.js";

export const EDIT_AFFORDANCES = ["modify", "split", "merge", "undo", "redo"] as const;
export type EditAffordance = (typeof EDIT_AFFORDANCES)[number];

export interface ConflictState {
  message: string;
  /** What the user was doing when the conflict hit. */
  action: "edit" | "annotation" | "bulk";
}

function cloneSentence(sentence: SentenceView): SentenceView {
  return JSON.parse(JSON.stringify(sentence)) as SentenceView;
}

export class Workbench {
  doc: DocumentView | null = null;
  selectedTokenId: string | null = null;
  editMode = false;
  showRaw = false;
  buckwalter = false;
  conflict: ConflictState | null = null;
  lastError: string | null = null;
  bulkCount: number | null = null;
  readonly panel = new MorphPanel();
  private bwCache = new Map<string, string>();

  constructor(private api: ApiClient) {}

  async open(docId: string): Promise<void> {
    this.doc = await this.api.getDocument(docId);
    this.selectedTokenId = null;
    this.conflict = null;
    this.panel.close();
  }

  /** Refetch the document after a conflict. The panel draft survives so no
   * user input is lost; only the token strip is refreshed. */
  async reload(): Promise<void> {
    if (!this.doc) return;
    this.doc = await this.api.getDocument(this.doc.id);
    this.conflict = null;
  }

  get sentences(): SentenceView[] {
    return this.doc?.sentences ?? [];
  }

  sentenceOfToken(tokenId: string): SentenceView | null {
    for (const sentence of this.sentences) {
      if (sentence.tokens.some((t) => t.id === tokenId)) return sentence;
    }
    return null;
  }

  tokenById(tokenId: string): TokenView | null {
    for (const sentence of this.sentences) {
      const token = sentence.tokens.find((t) => t.id === tokenId);
      if (token) return token;
    }
    return null;
  }

  /** Select a token and prefill the panel: stored annotation if present
   * (the precomputed suggestion is stored at upload), else a blank draft. */
  selectToken(tokenId: string): void {
    const token = this.tokenById(tokenId);
    if (!token) return;
    this.selectedTokenId = tokenId;
    if (token.annotation) {
      this.panel.fillFromAnnotation(tokenId, token.surface, token.annotation);
    } else {
      this.panel.openBlank(tokenId, token.surface);
    }
  }

  toggleEditMode(): void {
    this.editMode = !this.editMode;
  }

  toggleRaw(): void {
    this.showRaw = !this.showRaw;
  }

  canUndo(sentenceId: string): boolean {
    const sentence = this.sentences.find((s) => s.id === sentenceId);
    return sentence ? sentence.can_undo : false;
  }

  canRedo(sentenceId: string): boolean {
    const sentence = this.sentences.find((s) => s.id === sentenceId);
    return sentence ? sentence.can_redo : false;
  }

  private replaceSentence(view: SentenceView): void {
    if (!this.doc?.sentences) return;
    const index = this.doc.sentences.findIndex((s) => s.id === view.id);
    if (index >= 0) this.doc.sentences[index] = view;
  }

  private applyLocally(sentence: SentenceView, kind: EditKind, targets: string[], after: string[]): void {
    const tokens = sentence.tokens;
    const index = tokens.findIndex((t) => t.id === targets[0]);
    if (index < 0) return;
    if (kind === "modify") {
      tokens[index] = {
        ...tokens[index],
        surface: after[0],
        provenance: "edited",
        stale: tokens[index].annotation !== null,
      };
    } else if (kind === "split") {
      const children: TokenView[] = after.map((surface, k) => ({
        id: `pending:${targets[0]}:${k}`,
        surface,
        position: index + k,
        provenance: "split-child",
        annotation: null,
        stale: false,
        suggestions: [],
      }));
      tokens.splice(index, 1, ...children);
    } else {
      const indices = targets
        .map((tid) => tokens.findIndex((t) => t.id === tid))
        .sort((a, b) => a - b);
      const merged: TokenView = {
        id: `pending:${targets[0]}`,
        surface: indices.map((i) => tokens[i].surface).join(""),
        position: indices[0],
        provenance: "merge-result",
        annotation: null,
        stale: false,
        suggestions: [],
      };
      tokens.splice(indices[0], indices.length, merged);
    }
    tokens.forEach((t, i) => (t.position = i));
  }

  /** Run one edit gesture: optimistic local update, server call, reconcile
   * with the authoritative sentence view; roll back on any failure. */
  async applyEdit(
    sentenceId: string,
    kind: EditKind,
    targets: string[],
    after: string[],
  ): Promise<boolean> {
    if (!this.doc) return false;
    const sentence = this.sentences.find((s) => s.id === sentenceId);
    if (!sentence) return false;
    const snapshot = cloneSentence(sentence);
    const version = this.doc.version;
    this.applyLocally(sentence, kind, targets, after);
    try {
      const result = await this.api.applyEdit(
        this.doc.id,
        sentenceId,
        kind,
        targets,
        after,
        version,
      );
      this.acceptMutation(result);
      return true;
    } catch (error) {
      this.replaceSentence(snapshot);
      this.handleFailure(error, "edit");
      return false;
    }
  }

  /** Commit the modify gesture. Typing whitespace inside a modify is a
   * split in disguise: the service rejects spaced surfaces, so the input
   * is routed to the split flow instead. */
  async commitModify(tokenId: string, newSurface: string): Promise<boolean> {
    const sentence = this.sentenceOfToken(tokenId);
    if (!sentence) return false;
    const parts = newSurface.split(/\s+/).filter((p) => p.length > 0);
    if (parts.length === 0) {
      this.lastError = "token surface must not be empty";
      return false;
    }
    if (parts.length > 1) {
      return this.applyEdit(sentence.id, "split", [tokenId], parts);
    }
    return this.applyEdit(sentence.id, "modify", [tokenId], parts);
  }

  async splitToken(tokenId: string, parts: string[]): Promise<boolean> {
    const sentence = this.sentenceOfToken(tokenId);
    if (!sentence) return false;
    return this.applyEdit(sentence.id, "split", [tokenId], parts);
  }

  async mergeTokens(tokenIds: string[]): Promise<boolean> {
    if (tokenIds.length < 2) {
      this.lastError = "select at least two tokens to merge";
      return false;
    }
    const sentence = this.sentenceOfToken(tokenIds[0]);
    if (!sentence) return false;
    return this.applyEdit(sentence.id, "merge", tokenIds, []);
  }

  async undo(sentenceId: string): Promise<boolean> {
    return this.cursorMove(sentenceId, "undo");
  }

  async redo(sentenceId: string): Promise<boolean> {
    return this.cursorMove(sentenceId, "redo");
  }

  private async cursorMove(sentenceId: string, direction: "undo" | "redo"): Promise<boolean> {
    if (!this.doc) return false;
    try {
      const result =
        direction === "undo"
          ? await this.api.undo(this.doc.id, sentenceId, this.doc.version)
          : await this.api.redo(this.doc.id, sentenceId, this.doc.version);
      this.acceptMutation(result);
      return true;
    } catch (error) {
      this.handleFailure(error, "edit");
      return false;
    }
  }

  private acceptMutation(result: SentenceMutation): void {
    if (!this.doc) return;
    this.doc.version = result.document_version;
    this.doc.status = result.status;
    this.replaceSentence(result.sentence);
    this.lastError = null;
    // keep the selection pointing at a live token
    if (this.selectedTokenId && !this.tokenById(this.selectedTokenId)) {
      this.selectedTokenId = null;
    }
  }

  private handleFailure(error: unknown, action: ConflictState["action"]): void {
    if (error instanceof ApiError && error.isConflict) {
      this.conflict = {
        message: "Someone else changed this document. Reload to continue; your pending input is kept.",
        action,
      };
      return;
    }
    this.lastError = error instanceof Error ? error.message : String(error);
  }

  /** Save the panel draft. On a version conflict the draft is retained and
   * the reload prompt raised; nothing is overwritten silently. */
  async saveAnnotation(): Promise<boolean> {
    if (!this.doc || !this.panel.tokenId) return false;
    try {
      const result = await this.api.submitAnnotation(
        this.doc.id,
        this.panel.tokenId,
        this.panel.toAnnotation(),
        this.doc.version,
      );
      this.doc.version = result.document_version;
      this.doc.status = result.status;
      const token = this.tokenById(this.panel.tokenId);
      if (token) {
        token.annotation = result.annotation;
        token.stale = false;
      }
      this.panel.dirty = false;
      this.lastError = null;
      return true;
    } catch (error) {
      this.handleFailure(error, "annotation");
      return false;
    }
  }

  /** How many current tokens share this exact orthography (the count shown
   * before bulk apply). */
  bulkMatchCount(surface: string): number {
    let count = 0;
    for (const sentence of this.sentences) {
      for (const token of sentence.tokens) {
        if (token.surface === surface) count += 1;
      }
    }
    return count;
  }

  async bulkApply(): Promise<number | null> {
    if (!this.doc || !this.panel.tokenId) return null;
    const surface = this.panel.tokenSurface;
    try {
      const result = await this.api.bulkApply(
        this.doc.id,
        surface,
        this.panel.toAnnotation(),
        this.doc.version,
      );
      this.bulkCount = result.count;
      // restyle every matching token as annotated
      const annotation = { ...this.panel.toAnnotation(), source: "bulk_applied" };
      for (const sentence of this.sentences) {
        for (const token of sentence.tokens) {
          if (token.surface === surface) {
            token.annotation = annotation;
            token.stale = false;
          }
        }
      }
      this.doc.version = result.document_version;
      this.lastError = null;
      return result.count;
    } catch (error) {
      this.handleFailure(error, "bulk");
      return null;
    }
  }

  async submitDocument(): Promise<boolean> {
    if (!this.doc) return false;
    try {
      const view = await this.api.submitDocument(this.doc.id, this.doc.version);
      this.doc.status = view.status;
      this.doc.version = view.version;
      return true;
    } catch (error) {
      this.handleFailure(error, "edit");
      return false;
    }
  }

  /** Toggle ASCII display. Surfaces are converted once per distinct sentence
   * text through the transliteration endpoint and cached. */
  async toggleBuckwalter(): Promise<void> {
    this.buckwalter = !this.buckwalter;
    if (!this.buckwalter) return;
    for (const sentence of this.sentences) {
      for (const token of sentence.tokens) {
        if (!this.bwCache.has(token.surface)) {
          const result = await this.api.transliterate(token.surface, "bw");
          this.bwCache.set(token.surface, result.text);
        }
      }
    }
  }

  displaySurface(token: TokenView): string {
    if (!this.buckwalter) return token.surface;
    return this.bwCache.get(token.surface) ?? token.surface;
  }
}
