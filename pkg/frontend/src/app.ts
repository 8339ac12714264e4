// Page wiring: set list with per-set progress, and the rating grid.
//
// Hash routing keeps it dependency-free: "#" lists sets, "#set-2" opens a
// grid. Drafts live in localStorage per (rater, set) and reattach to emojis
// by key, so the server's fresh display order on each load keeps previously
// selected values.

import { ApiError, fetchCampaign, fetchProgress, fetchSet, postRatings } from './api.js';
import { IncompleteGridError, RatingGrid } from './grid.js';
import type { GridDraft } from './grid.js';
import type { CellRef } from './types.js';

const app = document.getElementById('app')!;

const ZWJ = 0x200d;
const VS16 = String.fromCodePoint(0xfe0f);

export function glyphFor(key: string): string {
  const codepoints = key.split('-').map((part) => parseInt(part, 16));
  let glyph = '';
  codepoints.forEach((cp, i) => {
    glyph += String.fromCodePoint(cp);
    if (cp !== ZWJ && cp < 0x10000 && (i + 1 === codepoints.length || codepoints[i + 1] === ZWJ)) {
      glyph += VS16; // force emoji presentation for BMP symbols
    }
  });
  return glyph;
}

function getRater(): string {
  return localStorage.getItem('emotag:rater') ?? '';
}

function setRater(value: string): void {
  localStorage.setItem('emotag:rater', value.trim());
}

function draftKey(rater: string, setId: number): string {
  return `emotag:draft:${rater}:${setId}`;
}

function loadDraft(rater: string, setId: number): GridDraft | undefined {
  const raw = localStorage.getItem(draftKey(rater, setId));
  if (!raw) return undefined;
  try {
    return JSON.parse(raw) as GridDraft;
  } catch {
    return undefined;
  }
}

function saveDraft(rater: string, grid: RatingGrid): void {
  localStorage.setItem(draftKey(rater, grid.setId), JSON.stringify(grid.toDraft()));
}

function clearDraft(rater: string, setId: number): void {
  localStorage.removeItem(draftKey(rater, setId));
}

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function banner(message: string, retry?: () => void): HTMLElement {
  const box = el('div', 'banner');
  box.appendChild(el('span', undefined, message));
  if (retry) {
    const button = el('button', 'retry', 'retry') as HTMLButtonElement;
    button.addEventListener('click', retry);
    box.appendChild(button);
  }
  return box;
}

async function renderSetList(): Promise<void> {
  app.replaceChildren(el('p', 'muted', 'loading campaign…'));
  let campaign;
  try {
    campaign = await fetchCampaign();
  } catch {
    app.replaceChildren(banner('annotation service unreachable', () => void renderSetList()));
    return;
  }

  const page = el('div');
  page.appendChild(el('h1', undefined, 'Emoji-emotion rating'));
  const raterRow = el('div', 'rater-row');
  raterRow.appendChild(el('label', undefined, 'Your rater name: '));
  const input = el('input') as HTMLInputElement;
  input.value = getRater();
  input.placeholder = 'e.g. ann';
  input.addEventListener('change', () => {
    setRater(input.value);
    void renderSetList();
  });
  raterRow.appendChild(input);
  page.appendChild(raterRow);

  const rater = getRater();
  let progress: Record<string, number> = {};
  if (rater) {
    try {
      progress = (await fetchProgress(rater)).sets;
    } catch {
      progress = {};
    }
  }

  const list = el('div', 'set-list');
  for (const summary of campaign.sets) {
    const fraction = progress[String(summary.id)] ?? 0;
    const card = el('a', 'set-card') as HTMLAnchorElement;
    card.href = `#set-${summary.id}`;
    card.appendChild(el('h2', undefined, `Set ${summary.id + 1}`));
    card.appendChild(el('p', 'muted', `${summary.size} emojis × ${campaign.emotions.length} emotions`));
    const bar = el('div', 'progress');
    const fill = el('div', 'progress-fill');
    fill.style.width = `${Math.round(fraction * 100)}%`;
    if (fraction >= 1) fill.classList.add('done');
    bar.appendChild(fill);
    card.appendChild(bar);
    card.appendChild(el('p', 'muted', `${Math.round(fraction * 100)}% complete`));
    list.appendChild(card);
  }
  page.appendChild(list);
  app.replaceChildren(page);
}

async function renderGrid(setId: number): Promise<void> {
  const rater = getRater();
  if (!rater) {
    location.hash = '';
    return;
  }
  app.replaceChildren(el('p', 'muted', 'loading set…'));
  let payload;
  try {
    payload = await fetchSet(setId, rater);
  } catch {
    app.replaceChildren(banner('could not load this set', () => void renderGrid(setId)));
    return;
  }

  const grid = new RatingGrid(setId, payload.emojis, payload.emotions, payload.scale);
  grid.applyScores(payload.existing);
  grid.applyDraft(loadDraft(rater, setId));

  const page = el('div');
  const top = el('div', 'grid-top');
  const back = el('a', 'back', '← sets') as HTMLAnchorElement;
  back.href = '#';
  top.appendChild(back);
  top.appendChild(el('h1', undefined, `Set ${setId + 1}`));
  const counter = el('span', 'counter');
  top.appendChild(counter);
  page.appendChild(top);
  page.appendChild(
    el(
      'p',
      'muted',
      'For each emoji, select how strongly you associate it with every emotion: 0 = no association, 4 = strongest.'
    )
  );

  const status = el('div', 'status');
  page.appendChild(status);

  const scores: number[] = [];
  for (let s = payload.scale.min; s <= payload.scale.max; s++) scores.push(s);

  const table = el('table', 'grid');
  const head = el('tr');
  head.appendChild(el('th', undefined, 'emoji'));
  for (const emotion of payload.emotions) head.appendChild(el('th', undefined, emotion));
  table.appendChild(head);

  const cellNodes = new Map<string, HTMLElement>();
  for (const emoji of payload.emojis) {
    const row = el('tr');
    const label = el('td', 'emoji-cell', glyphFor(emoji));
    label.title = payload.names[emoji] ?? emoji;
    row.appendChild(label);
    for (const emotion of payload.emotions) {
      const cell = el('td', 'rating-cell');
      cellNodes.set(`${emoji}|${emotion}`, cell);
      const group = el('div', 'radio-row');
      for (const score of scores) {
        const wrap = el('label', 'radio');
        const radio = el('input') as HTMLInputElement;
        radio.type = 'radio';
        radio.name = `${emoji}:${emotion}`;
        radio.value = String(score);
        if (grid.getScore(emoji, emotion) === score) radio.checked = true;
        radio.addEventListener('change', () => {
          grid.setScore(emoji, emotion, score);
          saveDraft(rater, grid);
          cell.classList.remove('missing');
          refresh();
        });
        wrap.appendChild(radio);
        wrap.appendChild(el('span', undefined, String(score)));
        group.appendChild(wrap);
      }
      cell.appendChild(group);
      row.appendChild(cell);
    }
    table.appendChild(row);
  }
  page.appendChild(table);

  const submit = el('button', 'submit', 'Submit all ratings') as HTMLButtonElement;
  page.appendChild(submit);

  function highlightMissing(missing: CellRef[]): void {
    for (const ref of missing) {
      cellNodes.get(`${ref.emoji}|${ref.emotion}`)?.classList.add('missing');
    }
  }

  function refresh(): void {
    counter.textContent = `${grid.completedCells} / ${grid.totalCells}`;
    submit.disabled = !grid.isComplete();
  }

  submit.addEventListener('click', async () => {
    submit.disabled = true; // one in-flight submission at most
    status.textContent = 'submitting…';
    try {
      const batch = grid.toBatch(rater);
      await postRatings(batch);
      clearDraft(rater, setId);
      status.textContent = 'saved ✓';
      location.hash = '';
    } catch (error) {
      if (error instanceof IncompleteGridError) {
        highlightMissing(error.missing);
        status.textContent = `missing ${error.missing.length} cells`;
      } else if (error instanceof ApiError && error.status === 422) {
        const detail = error.detail as { missing?: CellRef[] } | string | null;
        if (detail && typeof detail === 'object' && detail.missing) {
          highlightMissing(detail.missing);
          status.textContent = `server reports ${detail.missing.length} missing cells`;
        } else {
          status.textContent = `rejected: ${JSON.stringify(detail)}`;
        }
      } else {
        status.textContent = 'submission failed; your draft is kept locally';
      }
      refresh();
    }
  });

  refresh();
  app.replaceChildren(page);
}

function route(): void {
  const match = location.hash.match(/^#set-(\d+)$/);
  if (match) {
    void renderGrid(Number(match[1]));
  } else {
    void renderSetList();
  }
}

window.addEventListener('hashchange', route);
route();
