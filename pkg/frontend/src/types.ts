// Wire types mirroring the session server's JSON payloads.

export type SessionStatus = "idle" | "attacking" | "stopped"

export interface StreamEvent {
    type: "original" | "generation" | "swap" | "revert" | "stopped"
    seq: number
    score: number
    description: string
    wmd?: number
    swap_count?: number
    timestamp?: string
    text?: string
    tokens?: string[]
    locks?: number[]
    generation?: number | null
    reason?: string
}

export interface SessionStub {
    id: string
    status: SessionStatus
    stop_reason: string | null
}

export interface SessionState {
    id: string
    status: SessionStatus
    stop_reason: string | null
    seq: number
    score: number
    wmd: number
    swap_count: number
    text: string
    tokens: string[]
    locks: number[]
    doc_id: string | null
    label: string | null
    queries_used: number
    snapshots: number
    config: Record<string, unknown>
    classifier: Record<string, unknown>
}

export interface Encodings {
    seq: number
    tokens: string[]
    locks: number[]
    influence: number[]
    selection_prob: number[]
    lm_score: number[]
}

export interface Candidate {
    word: string
    distance: number
    similarity: number
    score_delta: number
    lm_raw: number
    lm_norm: number
}

export interface CandidatesPayload {
    pos: number
    current: string
    records: Candidate[]
}

export interface SummaryRow {
    session_id: string
    doc_id: string | null
    label: string | null
    status: SessionStatus
    s_orig: number
    s_adv: number
    improvement_pct: number
    swap_count: number
    wmd: number
    pct_original_remaining: number
    avg_swap_lm: number
    min_swap_lm: number
    summary: number
}
