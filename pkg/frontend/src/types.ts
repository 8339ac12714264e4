// API payload shapes, mirroring the annotation service's JSON endpoints.

export interface Scale {
  min: number;
  max: number;
}

export interface SetSummary {
  id: number;
  size: number;
  emojis: string[];
}

export interface CampaignInfo {
  sets: SetSummary[];
  emotions: string[];
  scale: Scale;
  names: Record<string, string>;
}

export interface SetPayload {
  id: number;
  emojis: string[]; // server-randomized display order
  names: Record<string, string>;
  emotions: string[];
  scale: Scale;
  existing: Record<string, Record<string, number>>;
}

export interface RatingEntry {
  emoji: string;
  emotion: string;
  score: number;
}

export interface SubmissionBatch {
  rater: string;
  set_id: number;
  ratings: RatingEntry[];
}

export interface ProgressInfo {
  rater: string;
  sets: Record<string, number>;
}

export interface CellRef {
  emoji: string;
  emotion: string;
}
