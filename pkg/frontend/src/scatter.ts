// Replacement scatterplot: x is embedding similarity, y is normalized
// language-model fit, color is the classifier delta on a plasma ramp.
// Clicking a point is the swap command.

import { plasma, type Ramp } from "./ramps.js"
import type { Candidate } from "./types.js"

export interface ScatterPoint {
    record: Candidate
    x: number
    y: number
    color: string
}

export function scatterPoints(records: Candidate[], ramp: Ramp = plasma): ScatterPoint[] {
    if (records.length === 0) return []
    const deltas = records.map((r) => r.score_delta)
    const lo = Math.min(...deltas)
    const hi = Math.max(...deltas)
    return records.map((record) => ({
        record,
        x: record.similarity,
        y: record.lm_norm,
        // degenerate range: every delta is the maximum, so all brightest
        color: ramp(hi > lo ? (record.score_delta - lo) / (hi - lo) : 1),
    }))
}

const SVG_NS = "http://www.w3.org/2000/svg"
const SIZE = 320
const PAD = 36

/** Plot into `container`, replacing previous content. Both axes are
 *  anchored at 0 and span [0, 1]. */
export function renderScatterplot(
    container: HTMLElement,
    records: Candidate[],
    onSwap: (record: Candidate) => void,
): void {
    container.textContent = ""
    if (records.length === 0) {
        const notice = document.createElement("p")
        notice.className = "scatter-empty"
        notice.textContent = "no suggestions"
        container.appendChild(notice)
        return
    }

    const svg = document.createElementNS(SVG_NS, "svg")
    svg.setAttribute("viewBox", `0 0 ${SIZE} ${SIZE}`)
    svg.setAttribute("class", "scatter")

    const toPx = (v: number) => PAD + v * (SIZE - 2 * PAD)
    const toPy = (v: number) => SIZE - PAD - v * (SIZE - 2 * PAD)

    for (const [x1, y1, x2, y2] of [
        [PAD, SIZE - PAD, SIZE - PAD, SIZE - PAD],
        [PAD, SIZE - PAD, PAD, PAD],
    ]) {
        const axis = document.createElementNS(SVG_NS, "line")
        axis.setAttribute("x1", String(x1))
        axis.setAttribute("y1", String(y1))
        axis.setAttribute("x2", String(x2))
        axis.setAttribute("y2", String(y2))
        axis.setAttribute("stroke", "#888")
        svg.appendChild(axis)
    }

    for (const point of scatterPoints(records)) {
        const circle = document.createElementNS(SVG_NS, "circle")
        circle.setAttribute("cx", String(toPx(point.x)))
        circle.setAttribute("cy", String(toPy(point.y)))
        circle.setAttribute("r", "6")
        circle.setAttribute("fill", point.color)
        circle.setAttribute("data-word", point.record.word)
        circle.classList.add("scatter-point")
        const label = document.createElementNS(SVG_NS, "title")
        label.textContent =
            `${point.record.word}: sim ${point.record.similarity.toFixed(4)}, ` +
            `delta ${point.record.score_delta.toFixed(3)}, lm ${point.record.lm_norm.toFixed(2)}`
        circle.appendChild(label)
        circle.addEventListener("click", () => onSwap(point.record))
        svg.appendChild(circle)
    }
    container.appendChild(svg)
}
