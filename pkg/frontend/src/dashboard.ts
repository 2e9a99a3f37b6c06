// The session dashboard: linked document panes, candidate scatterplot,
// live event table and score chart, all fed by the server stream.

import { ApiClient } from "./api.js"
import { defaultTheme, encodeDocument, originalPaneVisuals, type Channel, type Theme } from "./encode.js"
import { renderScatterplot } from "./scatter.js"
import { tokenLayout, ViewState, type SortDir, type SortKey, type TableRow } from "./state.js"
import type { Candidate, Encodings, SessionState, SummaryRow } from "./types.js"

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag)
    if (className) node.className = className
    if (text !== undefined) node.textContent = text
    return node
}

const EVENT_COLUMNS: { key: SortKey; label: string }[] = [
    { key: "timestamp", label: "time" },
    { key: "description", label: "event" },
    { key: "swapCount", label: "swaps" },
    { key: "wmd", label: "wmd" },
    { key: "score", label: "score" },
]

export class EventTable {
    root = el("table", "event-table")
    onRevert: (seq: number) => void = () => undefined
    private head = el("thead")
    private body = el("tbody")
    private sortKey: SortKey | null = null
    private sortDir: SortDir = "asc"

    constructor() {
        const headRow = el("tr")
        for (const column of EVENT_COLUMNS) {
            const th = el("th", undefined, column.label)
            th.addEventListener("click", () => this.toggleSort(column.key))
            headRow.appendChild(th)
        }
        this.head.appendChild(headRow)
        this.root.appendChild(this.head)
        this.root.appendChild(this.body)
    }

    private toggleSort(key: SortKey) {
        if (this.sortKey === key) {
            this.sortDir = this.sortDir === "asc" ? "desc" : "asc"
        } else {
            this.sortKey = key
            this.sortDir = "asc"
        }
        if (this.lastState) this.render(this.lastState)
    }

    private lastState: ViewState | null = null

    render(state: ViewState) {
        this.lastState = state
        this.body.textContent = ""
        for (const row of state.sorted(this.sortKey, this.sortDir)) {
            this.body.appendChild(this.renderRow(row))
        }
    }

    private renderRow(row: TableRow): HTMLTableRowElement {
        const tr = el("tr", `event-${row.type}`)
        tr.dataset.seq = String(row.seq)
        tr.dataset.key = row.key
        tr.appendChild(el("td", undefined, row.timestamp.slice(11, 19)))
        tr.appendChild(el("td", undefined, row.description))
        tr.appendChild(el("td", undefined, row.swapCount === null ? "" : String(row.swapCount)))
        tr.appendChild(el("td", undefined, row.wmd === null ? "" : row.wmd.toFixed(3)))
        tr.appendChild(el("td", undefined, row.score.toFixed(3)))
        if (row.type !== "stopped") {
            tr.classList.add("revertable")
            tr.addEventListener("click", () => this.onRevert(row.seq))
        }
        return tr
    }
}

export class ScoreChart {
    root = el("div", "score-chart")

    render(state: ViewState) {
        this.root.textContent = ""
        if (state.chart.length === 0) return
        const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg")
        svg.setAttribute("viewBox", "0 0 400 120")
        const maxGen = Math.max(...state.chart.map((p) => p.generation), 1)
        const x = (g: number) => 10 + (g / maxGen) * 380
        const y = (s: number) => 60 - s * 50 // score in [-1, 1]
        const line = document.createElementNS("http://www.w3.org/2000/svg", "polyline")
        line.setAttribute(
            "points",
            state.chart.map((p) => `${x(p.generation)},${y(p.score)}`).join(" "),
        )
        line.setAttribute("fill", "none")
        line.setAttribute("stroke", "#2962ff")
        svg.appendChild(line)
        this.root.appendChild(svg)
    }
}

export class SessionTable {
    root = el("table", "session-table")
    onOpen: (sid: string) => void = () => undefined
    private body = el("tbody")

    constructor() {
        const head = el("thead")
        const tr = el("tr")
        for (const label of ["session", "doc", "status", "score", "swaps", "summary"]) {
            tr.appendChild(el("th", undefined, label))
        }
        head.appendChild(tr)
        this.root.appendChild(head)
        this.root.appendChild(this.body)
    }

    // the server already orders rows ascending by summary score: the
    // weakest adversaries surface first
    render(rows: SummaryRow[]) {
        this.body.textContent = ""
        for (const row of rows) {
            const tr = el("tr")
            tr.dataset.sid = row.session_id
            tr.appendChild(el("td", undefined, row.session_id.slice(0, 8)))
            tr.appendChild(el("td", undefined, row.doc_id ?? ""))
            tr.appendChild(el("td", undefined, row.status))
            tr.appendChild(el("td", undefined, row.s_adv.toFixed(3)))
            tr.appendChild(el("td", undefined, String(row.swap_count)))
            tr.appendChild(el("td", undefined, row.summary.toFixed(4)))
            tr.addEventListener("click", () => this.onOpen(row.session_id))
            this.body.appendChild(tr)
        }
    }
}

export class Dashboard {
    root = el("div", "dashboard")
    state = new ViewState()
    table = new EventTable()
    chart = new ScoreChart()
    sessions = new SessionTable()
    active = new Set<Channel>(["influence", "selection", "semantic"])
    selectedPos: number | null = null
    /** Tests and callers can await the latest user-triggered round trip. */
    lastAction: Promise<void> = Promise.resolve()

    private sid: string | null = null
    private session: SessionState | null = null
    private original: { tokens: string[]; text: string } | null = null
    private encodings: Encodings | null = null
    private originalPane = el("p", "doc-text original-text")
    private currentPane = el("p", "doc-text current-text")
    private scatterHost = el("div", "scatter-host")
    private notice = el("p", "notice")
    private editInput = el("input") as HTMLInputElement
    private streamAbort: AbortController | null = null

    constructor(readonly api: ApiClient, readonly theme: Theme = defaultTheme) {
        const panes = el("section", "panes")
        const originalBox = el("div", "doc original")
        originalBox.appendChild(el("h3", undefined, "original"))
        originalBox.appendChild(this.originalPane)
        const currentBox = el("div", "doc current")
        currentBox.appendChild(el("h3", undefined, "adversarial"))
        currentBox.appendChild(this.currentPane)
        panes.appendChild(originalBox)
        panes.appendChild(currentBox)

        const controls = el("section", "controls")
        for (const channel of ["influence", "selection", "semantic"] as Channel[]) {
            const label = el("label", "toggle", channel)
            const box = el("input") as HTMLInputElement
            box.type = "checkbox"
            box.checked = true
            box.addEventListener("change", () => {
                if (box.checked) this.active.add(channel)
                else this.active.delete(channel)
                this.renderPanes()
            })
            label.prepend(box)
            controls.appendChild(label)
        }
        const attack = el("button", undefined, "attack")
        attack.addEventListener("click", () => this.track(this.startAttack()))
        const stop = el("button", undefined, "stop")
        stop.addEventListener("click", () => this.track(this.stopAttack()))
        this.editInput.placeholder = "replacement word"
        const submit = el("button", undefined, "swap")
        submit.addEventListener("click", () => this.track(this.submitManualSwap()))
        controls.appendChild(attack)
        controls.appendChild(stop)
        controls.appendChild(this.editInput)
        controls.appendChild(submit)

        this.root.appendChild(panes)
        this.root.appendChild(controls)
        this.root.appendChild(this.notice)
        this.root.appendChild(this.scatterHost)
        this.root.appendChild(this.chart.root)
        this.root.appendChild(this.table.root)
        this.root.appendChild(this.sessions.root)

        this.table.onRevert = (seq) => this.track(this.revertTo(seq))
        this.sessions.onOpen = (sid) => this.track(this.open(sid))
    }

    track(action: Promise<void>): void {
        this.lastAction = action.catch((err) => {
            this.notice.textContent = String(err)
        })
    }

    async open(sid: string): Promise<void> {
        this.sid = sid
        this.state = new ViewState()
        this.selectedPos = null
        this.original = null
        await this.reloadDocument()
        if (this.session?.status === "attacking") {
            // joined mid-attack: the replay above covered the backlog, so
            // only newer events are needed
            this.state.attacking = true
            this.track(this.follow(this.state.lastSeq + 1).then(() => this.reloadDocument()))
        }
    }

    /** Pull state and encodings after any mutation, then re-render. */
    private async reloadDocument(): Promise<void> {
        if (!this.sid) return
        this.session = await this.api.getSession(this.sid)
        this.encodings = this.session.status === "attacking" ? null : await this.api.encodings(this.sid)
        // events published while no stream was open (manual swaps, reverts,
        // a finished attack) still need rows; snapshot 0 anchors the diff
        for (const event of await this.api.replay(this.sid, this.state.resumeFrom())) {
            if (event.type === "original" && event.tokens && event.text !== undefined) {
                this.original ??= { tokens: event.tokens, text: event.text }
            }
            this.state.append(event)
        }
        this.renderPanes()
        await this.refreshCandidates()
    }

    renderPanes(): void {
        if (!this.session) return
        const tokens = this.session.tokens
        this.currentPane.textContent = ""
        const visuals = this.encodings
            ? encodeDocument(this.encodings, this.active, this.theme)
            : tokens.map(() => ({ opacity: 1, background: null, color: this.theme.defaultColor }))
        const layout = tokenLayout(this.session.text, tokens)
        layout.slots.forEach(({ gap, surface }, i) => {
            if (gap) this.currentPane.appendChild(document.createTextNode(gap))
            const span = el("span", "token", surface)
            span.dataset.pos = String(i)
            span.style.opacity = String(visuals[i].opacity)
            if (visuals[i].background) span.style.backgroundColor = visuals[i].background as string
            span.style.color = visuals[i].color
            if (this.session!.locks.includes(i)) span.classList.add("locked")
            if (i === this.selectedPos) span.classList.add("selected")
            span.addEventListener("click", () => this.track(this.selectPosition(i)))
            this.pairHover(span, i)
            this.currentPane.appendChild(span)
        })
        if (layout.trailing) this.currentPane.appendChild(document.createTextNode(layout.trailing))

        this.originalPane.textContent = ""
        const original = this.original ?? { tokens, text: this.session.text }
        const originalVisuals = originalPaneVisuals(original.tokens, tokens, this.theme)
        const originalLayout = tokenLayout(original.text, original.tokens)
        originalLayout.slots.forEach(({ gap, surface }, i) => {
            if (gap) this.originalPane.appendChild(document.createTextNode(gap))
            const span = el("span", "token", surface)
            span.dataset.pos = String(i)
            span.style.color = originalVisuals[i].color
            if (originalVisuals[i].color === this.theme.swapColor) span.classList.add("swapped")
            this.pairHover(span, i)
            this.originalPane.appendChild(span)
        })
        if (originalLayout.trailing) {
            this.originalPane.appendChild(document.createTextNode(originalLayout.trailing))
        }

        this.table.render(this.state)
        this.chart.render(this.state)
    }

    private pairHover(span: HTMLElement, pos: number): void {
        span.addEventListener("mouseenter", () => this.setHover(pos, true))
        span.addEventListener("mouseleave", () => this.setHover(pos, false))
    }

    private setHover(pos: number, on: boolean): void {
        for (const pane of [this.originalPane, this.currentPane]) {
            const span = pane.querySelector(`[data-pos="${pos}"]`)
            if (span) span.classList.toggle("hover", on)
        }
    }

    async selectPosition(pos: number): Promise<void> {
        this.selectedPos = pos
        await this.refreshCandidates()
        this.renderPanes()
    }

    private async refreshCandidates(): Promise<void> {
        if (!this.sid || this.selectedPos === null || this.session?.status === "attacking") {
            this.scatterHost.textContent = ""
            return
        }
        const payload = await this.api.candidates(this.sid, this.selectedPos)
        renderScatterplot(this.scatterHost, payload.records, (record) =>
            this.track(this.swapTo(record)),
        )
    }

    async swapTo(record: Candidate): Promise<void> {
        if (!this.sid || this.selectedPos === null) return
        await this.api.swap(this.sid, this.selectedPos, record.word)
        await this.reloadDocument()
    }

    async submitManualSwap(): Promise<void> {
        const word = this.editInput.value.trim()
        if (!this.sid || this.selectedPos === null || word === "") return
        await this.api.swap(this.sid, this.selectedPos, word)
        this.editInput.value = ""
        await this.reloadDocument()
    }

    async revertTo(seq: number): Promise<void> {
        if (!this.sid) return
        await this.api.revert(this.sid, seq)
        await this.reloadDocument()
    }

    async startAttack(): Promise<void> {
        if (!this.sid) return
        await this.api.startAttack(this.sid)
        this.state.attacking = true
        // everything this attack publishes is newer than the table; starting
        // past the backlog keeps stop markers from earlier runs out of it
        await this.follow(this.state.lastSeq + 1)
        await this.reloadDocument()
    }

    async stopAttack(): Promise<void> {
        if (!this.sid) return
        await this.api.stopAttack(this.sid)
    }

    /** Consume the stream until the attack reports stopped. Reconnects
     *  resume from the last seen seq, so rows never duplicate. A stop
     *  marker always ends the loop; `fromSeq` lets attack paths start past
     *  the backlog so a marker from an earlier run cannot end it early. */
    async follow(fromSeq?: number): Promise<void> {
        if (!this.sid) return
        const floor = fromSeq ?? this.state.resumeFrom()
        for (;;) {
            this.streamAbort = new AbortController()
            try {
                for await (const event of this.api.stream(
                    this.sid,
                    Math.max(this.state.resumeFrom(), floor),
                    this.streamAbort.signal,
                )) {
                    if (this.state.append(event)) {
                        this.table.render(this.state)
                        this.chart.render(this.state)
                    }
                    if (event.type === "stopped") {
                        this.streamAbort.abort()
                        return
                    }
                }
            } catch {
                if (this.streamAbort.signal.aborted) return
            }
            if (this.streamAbort.signal.aborted) return
            // connection dropped: pause, then resume from the last seen seq
            await new Promise((resolve) => setTimeout(resolve, 500))
        }
    }

    async refreshSessions(): Promise<void> {
        if (!this.sid) return
        const payload = await this.api.summaries(this.sid)
        this.sessions.render(payload.sessions)
    }

    /** The text a reader actually sees in the adversarial pane. */
    documentText(): string {
        return this.currentPane.textContent ?? ""
    }
}
