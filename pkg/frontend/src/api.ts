// Thin fetch wrapper over the session server. Every mutation flows
// through here; the dashboard never rewinds state client-side.

import type {
    CandidatesPayload,
    Encodings,
    SessionState,
    SessionStub,
    StreamEvent,
    SummaryRow,
} from "./types.js"

export class ApiError extends Error {
    constructor(
        readonly status: number,
        readonly kind: string,
        detail: string,
    ) {
        super(`${kind}: ${detail}`)
    }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>

export class ApiClient {
    private fetchFn: FetchLike

    constructor(readonly base: string, fetchFn?: FetchLike) {
        this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init))
    }

    private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
        const init: RequestInit = { method }
        if (body !== undefined) {
            init.headers = { "Content-Type": "application/json" }
            init.body = JSON.stringify(body)
        }
        const resp = await this.fetchFn(this.base + path, init)
        if (!resp.ok) {
            let kind = `HTTP ${resp.status}`
            let detail = resp.statusText
            try {
                const payload = await resp.json()
                kind = payload.error ?? kind
                detail = payload.detail ?? detail
            } catch {
                // non-JSON error body; keep the status line
            }
            throw new ApiError(resp.status, kind, detail)
        }
        return resp.json() as Promise<T>
    }

    createSession(payload: {
        text?: string
        label?: string
        record_id?: string
        config?: object
        classifier?: object
    }) {
        return this.request<SessionState>("POST", "/sessions", payload)
    }

    listSessions() {
        return this.request<{ sessions: SessionStub[] }>("GET", "/sessions")
    }

    getSession(sid: string) {
        return this.request<SessionState>("GET", `/sessions/${sid}`)
    }

    startAttack(sid: string) {
        return this.request<SessionState>("POST", `/sessions/${sid}/attack`)
    }

    stopAttack(sid: string) {
        return this.request<SessionState>("POST", `/sessions/${sid}/stop`)
    }

    swap(sid: string, pos: number, word: string) {
        return this.request<SessionState>("POST", `/sessions/${sid}/swap`, { pos, word })
    }

    revert(sid: string, seq: number) {
        return this.request<SessionState>("POST", `/sessions/${sid}/revert`, { seq })
    }

    encodings(sid: string) {
        return this.request<Encodings>("GET", `/sessions/${sid}/encodings`)
    }

    candidates(sid: string, pos: number) {
        return this.request<CandidatesPayload>("GET", `/sessions/${sid}/candidates?pos=${pos}`)
    }

    summaries(sid: string) {
        return this.request<{ sessions: SummaryRow[] }>("GET", `/sessions/${sid}/summaries`)
    }

    /** Follow the NDJSON event stream; blank keep-alive lines are skipped.
     *  With follow=false the server closes after replaying the backlog. */
    async *stream(
        sid: string,
        fromSeq = 0,
        signal?: AbortSignal,
        follow = true,
    ): AsyncGenerator<StreamEvent> {
        const resp = await this.fetchFn(
            `${this.base}/sessions/${sid}/stream?from=${fromSeq}&follow=${follow}`,
            { signal } as RequestInit,
        )
        if (!resp.ok || resp.body === null) {
            throw new ApiError(resp.status, "stream", "could not open event stream")
        }
        const reader = resp.body.getReader()
        const decoder = new TextDecoder()
        let buffer = ""
        try {
            for (;;) {
                const { done, value } = await reader.read()
                if (done) break
                buffer += decoder.decode(value, { stream: true })
                let newline
                while ((newline = buffer.indexOf("\n")) >= 0) {
                    const line = buffer.slice(0, newline).trim()
                    buffer = buffer.slice(newline + 1)
                    if (line.length > 0) {
                        yield JSON.parse(line) as StreamEvent
                    }
                }
            }
        } finally {
            reader.cancel().catch(() => undefined)
        }
    }

    /** One-shot replay of the event log from a sequence number. */
    async replay(sid: string, fromSeq = 0): Promise<StreamEvent[]> {
        const events: StreamEvent[] = []
        for await (const event of this.stream(sid, fromSeq, undefined, false)) {
            events.push(event)
        }
        return events
    }
}
