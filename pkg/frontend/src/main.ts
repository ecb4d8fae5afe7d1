/** Application shell: login, document picker, annotation workbench, and
 * the management dashboard for leads. */

import { ApiClient, ApiError } from "./api.js";
import { Dashboard } from "./dashboard.js";
import {
  clear,
  el,
  renderConflictPrompt,
  renderEditToolbar,
  renderMorphPanel,
  renderProgressChart,
  renderSearchPanel,
  renderTokenStrip,
} from "./render.js";
import { SearchPanel } from "./search.js";
import { Workbench } from "./workbench.js";
import type { TagSetView, UserView } from "./types.js";

const api = new ApiClient("");
const workbench = new Workbench(api);
const search = new SearchPanel(api);
const dashboard = new Dashboard(api);
let currentUser: UserView | null = null;
let tagset: TagSetView | null = null;

function root(): HTMLElement {
  return document.getElementById("app")!;
}

function rerender(): void {
  if (!currentUser) {
    renderLogin();
  } else if (workbench.doc) {
    renderWorkbench();
  } else {
    renderHome();
  }
}

function renderLogin(): void {
  const container = root();
  clear(container);
  const form = el("form", { class: "login" });
  const name = el("input", { placeholder: "name", autocomplete: "username" });
  const credential = el("input", { type: "password", placeholder: "credential" });
  const button = el("button", { type: "submit" }, "Sign in");
  const error = el("p", { class: "error" });
  form.append(name, credential, button, error);
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    try {
      currentUser = await api.login(name.value, credential.value);
      tagset = await api.tagset();
      rerender();
    } catch (e) {
      error.textContent = e instanceof ApiError ? e.message : "login failed";
    }
  });
  container.appendChild(form);
}

async function renderHome(): Promise<void> {
  const container = root();
  clear(container);
  container.appendChild(el("h2", {}, `Signed in as ${currentUser!.name} (${currentUser!.role})`));

  const docList = el("div", { class: "doc-list" });
  const documents = await api.listDocuments();
  for (const row of documents) {
    const item = el(
      "button",
      { class: "doc-item", "data-doc": row.id },
      `${row.title} [${row.status}] (${row.sentences} sentences)`,
    );
    item.addEventListener("click", async () => {
      await workbench.open(row.id);
      rerender();
    });
    docList.appendChild(item);
  }
  container.appendChild(el("h3", {}, "Documents"));
  container.appendChild(docList);

  if (currentUser!.role === "lead") {
    container.appendChild(el("h3", {}, "Management"));
    await dashboard.refresh();
    renderDashboard(container);
  }
}

function renderDashboard(container: HTMLElement): void {
  const panel = el("div", { class: "dashboard" });

  const userForm = el("div", { class: "user-admin" });
  const uname = el("input", { placeholder: "new user name" });
  const urole = el("select");
  urole.append(el("option", { value: "annotator" }, "annotator"), el("option", { value: "lead" }, "lead"));
  const ucred = el("input", { placeholder: "credential" });
  const uadd = el("button", {}, "Create user");
  uadd.addEventListener("click", async () => {
    await dashboard.createUser(uname.value, urole.value, ucred.value);
    rerender();
  });
  userForm.append(uname, urole, ucred, uadd);
  panel.appendChild(userForm);
  panel.appendChild(
    el("p", {}, `Users: ${dashboard.users.map((u) => `${u.name} (${u.role})`).join(", ")}`),
  );

  const uploadForm = el("div", { class: "upload" });
  const title = el("input", { placeholder: "title" });
  const dialect = el("input", { placeholder: "dialect (e.g. GLF)" });
  const text = el("textarea", { placeholder: "raw text, one sentence per line", dir: "rtl" });
  const doUpload = el("button", {}, "Upload");
  doUpload.addEventListener("click", async () => {
    await dashboard.upload(title.value, dialect.value, text.value);
    rerender();
  });
  uploadForm.append(title, dialect, text, doUpload);
  panel.appendChild(uploadForm);

  const assignForm = el("div", { class: "assign" });
  const docSelect = el("select", { class: "assign-doc" });
  for (const row of dashboard.documents) {
    if (row.status === "uploaded" || row.status === "rejected") {
      docSelect.appendChild(el("option", { value: row.id }, `${row.title} (${row.status})`));
    }
  }
  const userSelect = el("select", { class: "assign-user" });
  for (const user of dashboard.users) {
    userSelect.appendChild(el("option", { value: user.name }, user.name));
  }
  const doAssign = el("button", {}, "Assign");
  doAssign.addEventListener("click", async () => {
    await dashboard.assign(docSelect.value, userSelect.value);
    rerender();
  });
  assignForm.append(docSelect, userSelect, doAssign);
  panel.appendChild(assignForm);

  const progress = el("div", { class: "progress" });
  renderProgressChart(progress, dashboard);
  panel.appendChild(progress);

  const iaaForm = el("div", { class: "iaa-runner" });
  const iaaDoc = el("input", { placeholder: "doc id" });
  const iaaGold = el("input", { placeholder: "gold id" });
  const runIaa = el("button", {}, "Run IAA");
  const iaaOut = el("pre", { class: "iaa-report" });
  runIaa.addEventListener("click", async () => {
    const report = await dashboard.runIaa(iaaDoc.value, iaaGold.value);
    iaaOut.textContent = report ? JSON.stringify(report, null, 2) : dashboard.error ?? "";
  });
  iaaForm.append(iaaDoc, iaaGold, runIaa, iaaOut);
  panel.appendChild(iaaForm);

  const exportForm = el("div", { class: "export" });
  const exportDoc = el("input", { placeholder: "doc id" });
  const doExport = el("button", {}, "Download export");
  doExport.addEventListener("click", async () => {
    const text = await dashboard.exportText(exportDoc.value);
    if (text === null) return;
    const blob = new Blob([text], { type: "application/json" });
    const link = el("a", { download: `${exportDoc.value}.json` });
    link.href = URL.createObjectURL(blob);
    link.click();
    URL.revokeObjectURL(link.href);
  });
  exportForm.append(exportDoc, doExport);
  panel.appendChild(exportForm);

  container.appendChild(panel);
}

function renderWorkbench(): void {
  const container = root();
  clear(container);
  const doc = workbench.doc!;
  const header = el("div", { class: "workbench-header" });
  header.appendChild(el("h2", {}, `${doc.title} — ${doc.status} (v${doc.version})`));

  const back = el("button", {}, "Back");
  back.addEventListener("click", () => {
    workbench.doc = null;
    rerender();
  });
  const editToggle = el("button", { class: "toggle-edit" }, workbench.editMode ? "Annotate" : "Edit text");
  editToggle.addEventListener("click", () => {
    workbench.toggleEditMode();
    rerender();
  });
  const rawToggle = el("button", { class: "toggle-raw" }, workbench.showRaw ? "Hide original" : "Show original");
  rawToggle.addEventListener("click", () => {
    workbench.toggleRaw();
    rerender();
  });
  const bwToggle = el("button", { class: "toggle-bw" }, workbench.buckwalter ? "Arabic script" : "Buckwalter");
  bwToggle.addEventListener("click", async () => {
    await workbench.toggleBuckwalter();
    rerender();
  });
  const submitButton = el("button", { class: "submit-doc" }, "Submit document");
  if (doc.status !== "in_progress") submitButton.setAttribute("disabled", "");
  submitButton.addEventListener("click", async () => {
    await workbench.submitDocument();
    rerender();
  });
  header.append(back, editToggle, rawToggle, bwToggle, submitButton);
  container.appendChild(header);

  const conflictBox = el("div", { class: "conflict-area" });
  renderConflictPrompt(conflictBox, workbench, rerender);
  container.appendChild(conflictBox);
  if (workbench.lastError) {
    container.appendChild(el("p", { class: "error" }, workbench.lastError));
  }

  const body = el("div", { class: "workbench-body" });
  const strip = el("div", { class: "sentences" });
  for (const sentence of workbench.sentences) {
    const block = el("div", { class: "sentence-block" });
    renderTokenStrip(block, workbench, sentence, rerender);
    if (workbench.editMode) {
      renderEditToolbar(block, workbench, sentence, rerender);
    }
    strip.appendChild(block);
  }
  body.appendChild(strip);

  const side = el("div", { class: "side" });
  const morph = el("div", { class: "morph-area" });
  renderMorphPanel(morph, workbench.panel, tagset, workbench, rerender);
  side.appendChild(morph);
  const searchBox = el("div", { class: "search-area" });
  renderSearchPanel(searchBox, search, workbench.panel, rerender);
  side.appendChild(searchBox);
  body.appendChild(side);
  container.appendChild(body);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  rerender();
}
