// Client-side mirror of the server's event log. Rows are keyed so that
// replaying a stream segment after a reconnect can never duplicate one.

import type { StreamEvent } from "./types.js"

export interface TableRow {
    key: string
    seq: number
    type: StreamEvent["type"]
    timestamp: string
    description: string
    swapCount: number | null
    wmd: number | null
    score: number
    text: string | null
}

export interface ChartPoint {
    generation: number
    score: number
}

export type SortKey = "seq" | "timestamp" | "description" | "swapCount" | "wmd" | "score"
export type SortDir = "asc" | "desc"

export interface TokenSlot {
    gap: string
    surface: string
}

/** Recover each token's leading whitespace from the full text, so the
 *  rendered spans concatenate back to the text exactly. Every non-gap
 *  character belongs to some token, so a forward scan cannot misalign. */
export function tokenLayout(text: string, tokens: string[]): { slots: TokenSlot[]; trailing: string } {
    const slots: TokenSlot[] = []
    let cursor = 0
    for (const surface of tokens) {
        const start = text.indexOf(surface, cursor)
        if (start < 0) {
            throw new Error(`token ${JSON.stringify(surface)} not found in text`)
        }
        slots.push({ gap: text.slice(cursor, start), surface })
        cursor = start + surface.length
    }
    return { slots, trailing: text.slice(cursor) }
}

function rowKey(event: StreamEvent): string {
    // snapshot events own their seq; status markers share it, so they
    // carry the type (and reason) in the key instead
    if (event.type === "stopped") {
        return `stopped:${event.seq}:${event.reason ?? ""}`
    }
    return `snap:${event.seq}`
}

export class ViewState {
    rows: TableRow[] = []
    chart: ChartPoint[] = []
    lastSeq = -1
    stopReason: string | null = null
    attacking = false
    private seen = new Set<string>()

    /** Returns true when the event produced a new row. */
    append(event: StreamEvent): boolean {
        const key = rowKey(event)
        if (this.seen.has(key)) {
            return false
        }
        this.seen.add(key)
        this.rows.push({
            key,
            seq: event.seq,
            type: event.type,
            timestamp: event.timestamp ?? "",
            description: event.description,
            swapCount: event.swap_count ?? null,
            wmd: event.wmd ?? null,
            score: event.score,
            text: event.text ?? null,
        })
        if (event.seq > this.lastSeq) {
            this.lastSeq = event.seq
        }
        if (event.type === "generation" && event.generation != null) {
            this.chart.push({ generation: event.generation, score: event.score })
        }
        if (event.type === "stopped") {
            this.stopReason = event.reason ?? null
            this.attacking = false
        }
        return true
    }

    /** Resume point for a reconnect: the last seq itself, so a stopped
     *  marker sharing that seq is replayed (and deduplicated). */
    resumeFrom(): number {
        return Math.max(0, this.lastSeq)
    }

    /** Stable sort for display; insertion order is never mutated. */
    sorted(key: SortKey | null, dir: SortDir = "asc"): TableRow[] {
        if (key === null) {
            return [...this.rows]
        }
        const sign = dir === "asc" ? 1 : -1
        return [...this.rows].sort((a, b) => {
            const va = a[key]
            const vb = b[key]
            if (va === vb) return 0
            if (va === null) return 1 // blanks sink regardless of direction
            if (vb === null) return -1
            return va < vb ? -sign : sign
        })
    }
}
