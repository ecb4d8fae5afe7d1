/** Typed client for the annotation service. All mutations send a fresh
 * X-Request-Id so network retries are idempotent server-side. */

import type {
  AnnotationView,
  DocumentRow,
  DocumentView,
  EditKind,
  IaaReportView,
  ProgressRowView,
  SearchResults,
  SentenceMutation,
  TagSetView,
  UserView,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public details?: unknown,
  ) {
    super(message);
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

let requestCounter = 0;

function freshRequestId(): string {
  requestCounter += 1;
  return `ui-${Date.now()}-${requestCounter}`;
}

export class ApiClient {
  private token: string | null = null;

  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  get authenticated(): boolean {
    return this.token !== null;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (method === "POST") headers["X-Request-Id"] = freshRequestId();
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    const data = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(
        response.status,
        data?.code ?? "error",
        data?.message ?? `request failed: ${response.status}`,
        data?.details,
      );
    }
    return data as T;
  }

  async login(name: string, credential: string): Promise<UserView> {
    const result = await this.request<{ token: string; user: UserView }>(
      "POST",
      "/api/login",
      { name, credential },
    );
    this.token = result.token;
    return result.user;
  }

  logout(): void {
    this.token = null;
  }

  createUser(name: string, role: string, credential: string): Promise<UserView> {
    return this.request("POST", "/api/users", { name, role, credential });
  }

  listUsers(): Promise<UserView[]> {
    return this.request("GET", "/api/users");
  }

  uploadDocument(title: string, dialect: string, text: string): Promise<DocumentView> {
    return this.request("POST", "/api/documents", { title, dialect, text });
  }

  listDocuments(): Promise<DocumentRow[]> {
    return this.request("GET", "/api/documents");
  }

  getDocument(docId: string): Promise<DocumentView> {
    return this.request("GET", `/api/documents/${docId}`);
  }

  assignDocument(docId: string, user: string): Promise<DocumentView> {
    return this.request("POST", `/api/documents/${docId}/assign`, { user });
  }

  applyEdit(
    docId: string,
    sentenceId: string,
    kind: EditKind,
    targets: string[],
    after: string[],
    expectedVersion: number,
  ): Promise<SentenceMutation> {
    return this.request("POST", `/api/documents/${docId}/sentences/${sentenceId}/edits`, {
      kind,
      targets,
      after,
      expected_version: expectedVersion,
    });
  }

  undo(docId: string, sentenceId: string, expectedVersion: number): Promise<SentenceMutation> {
    return this.request("POST", `/api/documents/${docId}/sentences/${sentenceId}/undo`, {
      expected_version: expectedVersion,
    });
  }

  redo(docId: string, sentenceId: string, expectedVersion: number): Promise<SentenceMutation> {
    return this.request("POST", `/api/documents/${docId}/sentences/${sentenceId}/redo`, {
      expected_version: expectedVersion,
    });
  }

  searchAnalyses(surface: string, dialect: string): Promise<SearchResults> {
    const params = new URLSearchParams({ surface, dialect });
    return this.request("GET", `/api/analyses?${params}`);
  }

  submitAnnotation(
    docId: string,
    tokenId: string,
    annotation: AnnotationView,
    expectedVersion: number,
  ): Promise<{ document_version: number; status: string; annotation: AnnotationView }> {
    return this.request("POST", `/api/documents/${docId}/annotations`, {
      token_id: tokenId,
      annotation,
      expected_version: expectedVersion,
    });
  }

  bulkApply(
    docId: string,
    surface: string,
    annotation: AnnotationView,
    expectedVersion: number,
  ): Promise<{ document_version: number; count: number }> {
    return this.request("POST", `/api/documents/${docId}/bulk-apply`, {
      surface,
      annotation,
      expected_version: expectedVersion,
    });
  }

  submitDocument(docId: string, expectedVersion?: number): Promise<DocumentView> {
    return this.request("POST", `/api/documents/${docId}/submit`, {
      expected_version: expectedVersion,
    });
  }

  reviewDocument(docId: string, verdict: string, note: string): Promise<DocumentView> {
    return this.request("POST", `/api/documents/${docId}/review`, { verdict, note });
  }

  progress(): Promise<{ rows: ProgressRowView[] }> {
    return this.request("GET", "/api/progress");
  }

  iaa(docId: string, goldId: string): Promise<IaaReportView> {
    const params = new URLSearchParams({ doc: docId, gold: goldId });
    return this.request("GET", `/api/iaa?${params}`);
  }

  exportDocument(docId: string): Promise<unknown> {
    return this.request("GET", `/api/documents/${docId}/export`);
  }

  tagset(): Promise<TagSetView> {
    return this.request("GET", "/api/tagset");
  }

  transliterate(text: string, to: "ar" | "bw"): Promise<{ text: string; warnings: string[] }> {
    const params = new URLSearchParams({ text, to });
    return this.request("GET", `/api/transliterate?${params}`);
  }
}
