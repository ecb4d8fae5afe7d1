/** Management dashboard state: users, documents, assignment, progress,
 * IAA runs, export. Each action is a thin call over one API endpoint. */

import { ApiClient } from "./api.js";
import type {
  DocumentRow,
  IaaReportView,
  ProgressRowView,
  UserView,
} from "./types.js";

export interface ProgressBar {
  label: string;
  fraction: number;
  detail: string;
}

export class Dashboard {
  users: UserView[] = [];
  documents: DocumentRow[] = [];
  progressRows: ProgressRowView[] = [];
  iaaReport: IaaReportView | null = null;
  error: string | null = null;

  constructor(private api: ApiClient) {}

  async refresh(): Promise<void> {
    try {
      [this.users, this.documents] = await Promise.all([
        this.api.listUsers(),
        this.api.listDocuments(),
      ]);
      this.progressRows = (await this.api.progress()).rows;
      this.error = null;
    } catch (error) {
      this.error = error instanceof Error ? error.message : String(error);
    }
  }

  async createUser(name: string, role: string, credential: string): Promise<UserView | null> {
    try {
      const user = await this.api.createUser(name, role, credential);
      this.users.push(user);
      this.error = null;
      return user;
    } catch (error) {
      this.error = error instanceof Error ? error.message : String(error);
      return null;
    }
  }

  async upload(title: string, dialect: string, text: string): Promise<string | null> {
    try {
      const doc = await this.api.uploadDocument(title, dialect, text);
      await this.refresh();
      return doc.id;
    } catch (error) {
      this.error = error instanceof Error ? error.message : String(error);
      return null;
    }
  }

  async assign(docId: string, userName: string): Promise<boolean> {
    try {
      await this.api.assignDocument(docId, userName);
      await this.refresh();
      return true;
    } catch (error) {
      this.error = error instanceof Error ? error.message : String(error);
      return false;
    }
  }

  async review(docId: string, verdict: string, note: string): Promise<boolean> {
    try {
      await this.api.reviewDocument(docId, verdict, note);
      await this.refresh();
      return true;
    } catch (error) {
      this.error = error instanceof Error ? error.message : String(error);
      return false;
    }
  }

  async runIaa(docId: string, goldId: string): Promise<IaaReportView | null> {
    try {
      this.iaaReport = await this.api.iaa(docId, goldId);
      this.error = null;
      return this.iaaReport;
    } catch (error) {
      this.error = error instanceof Error ? error.message : String(error);
      return null;
    }
  }

  /** Export as a pretty-printed JSON string ready for a download blob. */
  async exportText(docId: string): Promise<string | null> {
    try {
      const data = await this.api.exportDocument(docId);
      return JSON.stringify(data, null, 2);
    } catch (error) {
      this.error = error instanceof Error ? error.message : String(error);
      return null;
    }
  }

  /** Per-document annotation completeness, for the progress chart. */
  progressBars(): ProgressBar[] {
    return this.progressRows.map((row) => ({
      label: `${row.title} (${row.status})`,
      fraction: row.words_total > 0 ? row.words_annotated / row.words_total : 0,
      detail:
        `${row.words_annotated}/${row.words_total} words` +
        (row.words_per_hour !== null ? `, ${Math.round(row.words_per_hour)} words/hour` : ""),
    }));
  }
}
