from pde.parser import extract_blocks, parse_text

TWO_EXAMPLE_DOCUMENT = """\
==== Data Codes ====
PDE p02 j1 tn a11.
==== Decoded ====
The woman sat.
==== Data Codes ====
PDE p01 j1 a11. p02 j1 tn a11..
==== Decoded ====
The man sits. The woman sat.
"""


def test_block_inside_a_source_comment():
    result = extract_blocks("x=1 // PDE p01 j1 a11.. rest")
    assert [b.text for b in result.blocks] == ["PDE p01 j1 a11.."]
    assert result.blocks[0].span == (7, 23)
    assert not result.diagnostics


def test_document_without_blocks():
    result = extract_blocks("no blocks here")
    assert result.blocks == ()
    assert result.diagnostics == ()


def test_two_blocks_from_interleaved_document():
    result = extract_blocks(TWO_EXAMPLE_DOCUMENT)
    assert [b.text for b in result.blocks] == [
        "PDE p02 j1 tn a11.",
        "PDE p01 j1 a11. p02 j1 tn a11..",
    ]
    for block in result.blocks:
        parse_text(block.text)  # every extracted block parses
    assert not result.diagnostics


def test_spans_point_back_into_the_document():
    result = extract_blocks(TWO_EXAMPLE_DOCUMENT)
    for block in result.blocks:
        start, end = block.span
        assert TWO_EXAMPLE_DOCUMENT[start:end] == block.text


def test_truncated_block_is_skipped_with_diagnostic():
    document = "PDE p02 j1 tn a11.\nPDE p01 j1 a11. p02 j1\n"
    result = extract_blocks(document)
    assert [b.text for b in result.blocks] == ["PDE p02 j1 tn a11."]
    assert len(result.diagnostics) == 1
    assert "unterminated" in result.diagnostics[0].message


def test_spaced_block_terminator():
    result = extract_blocks("note PDE p01 j1 a11. p02 j1 tn a11. . done")
    assert [b.text for b in result.blocks] == ["PDE p01 j1 a11. p02 j1 tn a11. ."]
    parse_text(result.blocks[0].text)


def test_single_sentence_block_at_line_end():
    result = extract_blocks("header\nPDE p02 j1 tn a11.\nfooter\n")
    assert [b.text for b in result.blocks] == ["PDE p02 j1 tn a11."]


def test_concatenating_documents_concatenates_blocks():
    doc_a = "PDE p02 j1 tn a11.\n"
    doc_b = "x // PDE p01 j1 a11.. y\n"
    blocks_a = [b.text for b in extract_blocks(doc_a).blocks]
    blocks_b = [b.text for b in extract_blocks(doc_b).blocks]
    combined = [b.text for b in extract_blocks(doc_a + doc_b).blocks]
    assert combined == blocks_a + blocks_b


def test_mixed_host_document_yields_three_blocks():
    document = (
        "#include <stdio.h>\n"
        "// PDE p02 j1 tn a11.. archival note\n"
        "<meta name='note' content='PDE p01 j1 a11 u1 s01 bG1 e02..'/>\n"
        "Plain prose follows, and then a data line.\n"
        "PDE u1 G2 C03 s01 p02 j1 nG a11 bG1 e02..\n"
    )
    result = extract_blocks(document)
    assert len(result.blocks) == 3
    for block in result.blocks:
        parse_text(block.text)
    assert not result.diagnostics
