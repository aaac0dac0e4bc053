import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, filterParams, filtersOf } from "../src/api.js";
import { emptyState } from "../src/state.js";

describe("filterParams", () => {
  it("maps each filter to its API parameter", () => {
    const params = filterParams({
      logKw: "race-condition",
      maxMatches: 1,
      pathKw: "src",
      excludePath: "test",
    });
    expect(params.get("log_kw")).toBe("race-condition");
    expect(params.get("max_matches")).toBe("1");
    expect(params.get("path_kw")).toBe("src");
    expect(params.get("exclude_path")).toBe("test");
  });

  it("omits unset filters entirely", () => {
    expect(filterParams({}).toString()).toBe("");
    expect(filterParams({ logKw: null, maxMatches: null }).toString()).toBe("");
  });

  it("derives filters from view state", () => {
    const state = { ...emptyState(), excludePath: "test" };
    expect(filterParams(filtersOf(state)).toString()).toBe("exclude_path=test");
  });
});

describe("ApiClient urls", () => {
  const client = new ApiClient("");

  it("builds plain and filtered endpoints", () => {
    expect(client.filesUrl({})).toBe("/api/files");
    expect(client.filesUrl({ excludePath: "test" })).toBe(
      "/api/files?exclude_path=test",
    );
    expect(client.patternsUrl({ maxMatches: 1 }, "src/A.java")).toBe(
      "/api/patterns?max_matches=1&file=src%2FA.java",
    );
  });

  it("encodes keyword values", () => {
    expect(client.filesUrl({ logKw: "null pointer" })).toBe(
      "/api/files?log_kw=null+pointer",
    );
  });
});

describe("ApiClient fetching", () => {
  afterEach(() => vi.unstubAllGlobals());

  it("requests the built URL and returns the payload", async () => {
    const payload = [{ path: "A.java", match_count: 1 }];
    const fetchMock = vi.fn(async () => new Response(JSON.stringify(payload)));
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient("http://example.test");
    await expect(client.files({ excludePath: "test" })).resolves.toEqual(payload);
    expect(fetchMock).toHaveBeenCalledWith(
      "http://example.test/api/files?exclude_path=test",
    );
  });

  it("raises on HTTP errors", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => new Response("nope", { status: 404 })));
    const client = new ApiClient("http://example.test");
    await expect(client.source("missing.java")).rejects.toThrow("HTTP 404");
  });
});
