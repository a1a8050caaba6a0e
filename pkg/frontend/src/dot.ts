/** Parser for the service's DOT dialect: a quoted digraph title, quoted node
 * statements, and quoted `a -> b` edge statements. */

export interface DotGraph {
  title: string;
  nodes: string[];
  edges: [string, string][];
}

type Token = { kind: "str" | "punct" | "word"; text: string };

function tokenize(text: string): Token[] {
  const tokens: Token[] = [];
  let i = 0;
  while (i < text.length) {
    const ch = text[i];
    if (/\s/.test(ch)) {
      i++;
      continue;
    }
    if (ch === '"') {
      let out = "";
      i++;
      while (i < text.length && text[i] !== '"') {
        if (text[i] === "\\" && i + 1 < text.length) {
          out += text[i + 1];
          i += 2;
        } else {
          out += text[i];
          i++;
        }
      }
      if (text[i] !== '"') throw new Error("unterminated string in DOT text");
      i++;
      tokens.push({ kind: "str", text: out });
      continue;
    }
    if (ch === "{" || ch === "}" || ch === ";") {
      tokens.push({ kind: "punct", text: ch });
      i++;
      continue;
    }
    if (ch === "-" && text[i + 1] === ">") {
      tokens.push({ kind: "punct", text: "->" });
      i += 2;
      continue;
    }
    if (/[A-Za-z]/.test(ch)) {
      let j = i;
      while (j < text.length && /[A-Za-z0-9_]/.test(text[j])) j++;
      tokens.push({ kind: "word", text: text.slice(i, j) });
      i = j;
      continue;
    }
    throw new Error(`unexpected character ${JSON.stringify(ch)} in DOT text`);
  }
  return tokens;
}

export function parseDot(text: string): DotGraph {
  const tokens = tokenize(text);
  let pos = 0;
  const next = () => tokens[pos++];
  const peek = () => tokens[pos];
  const expect = (kind: Token["kind"], text?: string) => {
    const tok = next();
    if (!tok || tok.kind !== kind || (text !== undefined && tok.text !== text)) {
      throw new Error(`malformed DOT text near token ${pos}`);
    }
    return tok;
  };

  expect("word", "digraph");
  const title = expect("str").text;
  expect("punct", "{");
  const nodes: string[] = [];
  const edges: [string, string][] = [];
  while (peek() && !(peek().kind === "punct" && peek().text === "}")) {
    const head = expect("str").text;
    if (peek()?.kind === "punct" && peek().text === "->") {
      next();
      const target = expect("str").text;
      edges.push([head, target]);
    } else if (!nodes.includes(head)) {
      nodes.push(head);
    }
    if (peek()?.kind === "punct" && peek().text === ";") next();
  }
  expect("punct", "}");
  for (const [from, to] of edges) {
    if (!nodes.includes(from)) nodes.push(from);
    if (!nodes.includes(to)) nodes.push(to);
  }
  return { title, nodes, edges };
}
