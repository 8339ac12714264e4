// Thin typed client for the annotation service's JSON API.

import type { CampaignInfo, ProgressInfo, SetPayload, SubmissionBatch } from './types.js';

export class ApiError extends Error {
  status: number;
  detail: unknown;

  constructor(status: number, detail: unknown) {
    super(`request failed with status ${status}`);
    this.status = status;
    this.detail = detail;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  const response = await fetch(path, init);
  if (!response.ok) {
    let detail: unknown = null;
    try {
      detail = (await response.json()).detail;
    } catch {
      detail = await response.text().catch(() => null);
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export function fetchCampaign(): Promise<CampaignInfo> {
  return request<CampaignInfo>('/api/campaign');
}

export function fetchSet(setId: number, rater: string): Promise<SetPayload> {
  const query = rater ? `?rater=${encodeURIComponent(rater)}` : '';
  return request<SetPayload>(`/api/sets/${setId}${query}`);
}

export function fetchProgress(rater: string): Promise<ProgressInfo> {
  return request<ProgressInfo>(`/api/progress/${encodeURIComponent(rater)}`);
}

export function postRatings(batch: SubmissionBatch, token?: string): Promise<{ accepted: number }> {
  const headers: Record<string, string> = { 'Content-Type': 'application/json' };
  if (token) {
    headers['X-Annotation-Token'] = token;
  }
  return request<{ accepted: number }>('/api/ratings', {
    method: 'POST',
    headers,
    body: JSON.stringify(batch),
  });
}
