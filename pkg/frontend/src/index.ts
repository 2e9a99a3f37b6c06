// Entry point: pick a server, list its sessions, open one in the dashboard.

import { ApiClient } from "./api.js"
import { Dashboard } from "./dashboard.js"

function serverBase(): string {
    const params = new URLSearchParams(window.location.search)
    return (params.get("server") ?? "http://127.0.0.1:8008").replace(/\/+$/, "")
}

class Launcher {
    root = document.createElement("div")
    private list = document.createElement("ul")
    private status = document.createElement("p")
    private textInput = document.createElement("textarea")
    private labelInput = document.createElement("select")

    constructor(readonly api: ApiClient, readonly dash: Dashboard) {
        this.root.className = "launcher"
        const heading = document.createElement("h2")
        heading.textContent = `sessions @ ${api.base}`
        this.root.appendChild(heading)
        this.root.appendChild(this.status)
        this.list.className = "session-list"
        this.root.appendChild(this.list)

        const form = document.createElement("div")
        form.className = "create-form"
        this.textInput.placeholder = "document text"
        this.textInput.rows = 3
        for (const label of ["neg", "pos"]) {
            const option = document.createElement("option")
            option.value = label
            option.textContent = label
            this.labelInput.appendChild(option)
        }
        const create = document.createElement("button")
        create.textContent = "new session"
        create.addEventListener("click", () => {
            this.create().catch((err) => {
                this.status.textContent = String(err)
            })
        })
        form.appendChild(this.textInput)
        form.appendChild(this.labelInput)
        form.appendChild(create)
        this.root.appendChild(form)
    }

    async refresh(): Promise<void> {
        const index = await this.api.listSessions()
        this.list.textContent = ""
        for (const stub of index.sessions) {
            const item = document.createElement("li")
            const link = document.createElement("a")
            link.href = "#"
            link.textContent = `${stub.id} (${stub.status}${stub.stop_reason ? ": " + stub.stop_reason : ""})`
            link.addEventListener("click", (ev) => {
                ev.preventDefault()
                this.open(stub.id)
            })
            item.appendChild(link)
            this.list.appendChild(item)
        }
        this.status.textContent = index.sessions.length === 0 ? "no sessions yet" : ""
    }

    private async create(): Promise<void> {
        const text = this.textInput.value.trim()
        if (text === "") return
        const state = await this.api.createSession({ text, label: this.labelInput.value })
        this.textInput.value = ""
        await this.refresh()
        this.open(state.id)
    }

    private open(sid: string): void {
        this.dash.track(this.dash.open(sid).then(() => this.dash.refreshSessions()))
    }
}

function boot(): void {
    const api = new ApiClient(serverBase())
    const dash = new Dashboard(api)
    const launcher = new Launcher(api, dash)
    document.body.appendChild(launcher.root)
    document.body.appendChild(dash.root)
    launcher.refresh().catch((err) => {
        const warning = document.createElement("p")
        warning.className = "notice"
        warning.textContent = `server unreachable: ${err}`
        document.body.prepend(warning)
    })
}

document.addEventListener("DOMContentLoaded", boot)
